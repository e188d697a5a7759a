//! Sparse multivariate polynomials over exact rationals or complex doubles.
//!
//! A polynomial is a map from exponent vectors to nonzero coefficients. The
//! number of variables is fixed per instance and every monomial has exactly
//! that many entries.

pub mod series;
pub mod univariate;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result, Q};

/// Coefficient ring of an [`MPoly`].
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_u64(n: u64) -> Self;
}

impl Coeff for Q {
    fn from_u64(n: u64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
}

impl Coeff for Complex64 {
    fn from_u64(n: u64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

/// Exponent vector `r` of the monomial `z^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn product(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// True when `self <= other` componentwise.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MPoly<T = Q> {
    nvars: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> MPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, T::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), T::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, T)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "monomial length must equal nvars");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Per-variable maximum exponents.
    pub fn degrees(&self) -> Vec<u32> {
        (0..self.nvars).map(|v| self.degree_in(v)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> MPoly<U> {
        let mut p = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), f(c));
        }
        p
    }

    /// Evaluates at `point`, reusing per-variable power tables.
    pub fn eval(&self, point: &[T]) -> Result<T> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let powers: Vec<Vec<T>> = (0..self.nvars)
            .map(|v| {
                let deg = self.degree_in(v) as usize;
                let mut row = Vec::with_capacity(deg + 1);
                row.push(T::one());
                for k in 1..=deg {
                    let next = row[k - 1].clone() * point[v].clone();
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[v][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Partial derivative of the given order in variable `var`.
    pub fn diff(&self, var: usize, order: u32) -> Self {
        assert!(var < self.nvars, "variable index out of range");
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e < order {
                continue;
            }
            let falling: u64 = (0..order as u64).map(|k| e as u64 - k).product();
            let mut nm = m.clone();
            nm.0[var] = e - order;
            p.add_term(nm, c.clone() * T::from_u64(falling));
        }
        p
    }

    /// Multi-index derivative `d^|k| / dz^k`.
    pub fn diff_multi(&self, orders: &[u32]) -> Self {
        orders
            .iter()
            .enumerate()
            .fold(self.clone(), |p, (v, &o)| if o == 0 { p } else { p.diff(v, o) })
    }

    /// Substitutes the listed variables by constants, keeping the variable
    /// count (substituted variables no longer appear).
    pub fn substitute(&self, values: &[(usize, T)]) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut nm = m.clone();
            for (v, val) in values {
                let e = nm.0[*v];
                for _ in 0..e {
                    coeff = coeff * val.clone();
                }
                nm.0[*v] = 0;
            }
            p.add_term(nm, coeff);
        }
        p
    }

    /// Coefficients of the univariate restriction in `var`, all other
    /// variables fixed at `point` (entry `k` multiplies `z_var^k`).
    pub fn restrict_to_var(&self, var: usize, point: &[T]) -> Result<Vec<T>> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let fixed: Vec<(usize, T)> = (0..self.nvars)
            .filter(|&v| v != var)
            .map(|v| (v, point[v].clone()))
            .collect();
        let sub = self.substitute(&fixed);
        let deg = sub.degree_in(var) as usize;
        let mut out = vec![T::zero(); deg + 1];
        for (m, c) in sub.terms {
            out[m.0[var] as usize] = c;
        }
        Ok(out)
    }
}

impl MPoly<Q> {
    pub fn to_complex(&self) -> MPoly<Complex64> {
        self.map_coeffs(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
    }

    /// Evaluates an exact polynomial at a complex point.
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Complex64> {
        self.to_complex().eval(point)
    }

    /// Smallest positive integer `lambda` with `lambda * self` integral.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()))
    }

    /// Canonical text form using the given variable names. Terms appear in
    /// graded-lexicographic order, highest first; the output reparses to the
    /// same polynomial.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut monos: Vec<(&Monomial, &Q)> = self.terms.iter().collect();
        monos.sort_by(|a, b| {
            b.0.total_degree()
                .cmp(&a.0.total_degree())
                .then_with(|| b.0.cmp(a.0))
        });
        let mut out = String::new();
        for (i, (m, c)) in monos.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        names[v].clone()
                    } else {
                        format!("{}^{}", names[v], e)
                    }
                })
                .collect();
            if vars.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

impl<T: Coeff> Add for &MPoly<T> {
    type Output = MPoly<T>;
    fn add(self, rhs: &MPoly<T>) -> MPoly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl<T: Coeff> Sub for &MPoly<T> {
    type Output = MPoly<T>;
    fn sub(self, rhs: &MPoly<T>) -> MPoly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p
    }
}

impl<T: Coeff> Mul for &MPoly<T> {
    type Output = MPoly<T>;
    fn mul(self, rhs: &MPoly<T>) -> MPoly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut p = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                p.add_term(ma.product(mb), ca.clone() * cb.clone());
            }
        }
        p
    }
}

impl<T: Coeff> Neg for &MPoly<T> {
    type Output = MPoly<T>;
    fn neg(self) -> MPoly<T> {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

/// Parses a rational from `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// Parses a rational, also accepting finite decimal notation such as
/// `0.25` or `-1.5e-3`, converted exactly.
pub fn parse_rational_or_decimal(s: &str) -> Option<Q> {
    if let Some(q) = parse_rational(s) {
        return Some(q);
    }
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{}{}", int_part, frac_part).parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Q::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `(a, b, …)` with rationals in `p/q` form.
pub fn fmt_vec(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(Q::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Smallest integer vector with the same direction as `v`.
pub fn primitive_integer_vector(v: &[Q]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
