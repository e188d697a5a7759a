//! Exact Taylor coefficients of `G/H` on a box of multi-indices.
//!
//! This is the ground-truth oracle every asymptotic prediction is compared
//! against. The division recurrence
//! `a_r = (g_r - sum_{0 < k <= r} h_k a_{r-k}) / h_0`
//! is run over scaled integers: with integral `G`, `H` and `b_r = a_r h_0^{|r|+1}`
//! no rational ever needs reducing, so large boxes stay cheap.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{MPoly, Monomial};
use crate::{Error, Result, Q};

/// Dense box of coefficients `a_r`, `0 <= r <= shape`, optionally cut to
/// total degree `<= cap`.
#[derive(Debug, Clone)]
pub struct SeriesTable {
    shape: Vec<u32>,
    strides: Vec<usize>,
    cap: Option<u32>,
    data: Vec<Q>,
}

impl SeriesTable {
    fn strides_for(shape: &[u32]) -> Vec<usize> {
        let mut strides = vec![1usize; shape.len()];
        for v in (0..shape.len().saturating_sub(1)).rev() {
            strides[v] = strides[v + 1] * (shape[v + 1] as usize + 1);
        }
        strides
    }

    /// Wraps explicit entries in row-major order (last variable fastest).
    pub fn from_entries(shape: Vec<u32>, data: Vec<Q>) -> Result<Self> {
        let len: usize = shape.iter().map(|&s| s as usize + 1).product();
        if data.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: data.len(),
            });
        }
        Ok(SeriesTable {
            strides: Self::strides_for(&shape),
            shape,
            cap: None,
            data,
        })
    }

    pub fn shape(&self) -> &[u32] {
        &self.shape
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn flat(&self, r: &[u32]) -> Option<usize> {
        if r.len() != self.shape.len() || r.iter().zip(&self.shape).any(|(a, b)| a > b) {
            return None;
        }
        if let Some(cap) = self.cap {
            if r.iter().sum::<u32>() > cap {
                return None;
            }
        }
        Some(r.iter().zip(&self.strides).map(|(&a, &s)| a as usize * s).sum())
    }

    fn unflat(&self, mut idx: usize) -> Vec<u32> {
        self.strides
            .iter()
            .map(|&s| {
                let e = idx / s;
                idx %= s;
                e as u32
            })
            .collect()
    }

    pub fn contains(&self, r: &[u32]) -> bool {
        self.flat(r).is_some()
    }

    /// Exact coefficient in lowest terms.
    pub fn get(&self, r: &[u32]) -> Option<Q> {
        self.flat(r).map(|i| self.data[i].reduced())
    }

    /// Exact coefficient as stored (possibly not in lowest terms).
    pub fn get_raw(&self, r: &[u32]) -> Option<&Q> {
        self.flat(r).map(|i| &self.data[i])
    }

    pub fn get_f64(&self, r: &[u32]) -> Option<f64> {
        self.get_raw(r).map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    pub fn set(&mut self, r: &[u32], value: Q) -> Result<()> {
        let i = self.flat(r).ok_or_else(|| {
            Error::Invalid(format!("index {:?} outside table of shape {:?}", r, self.shape))
        })?;
        self.data[i] = value;
        Ok(())
    }

    /// Multi-indices present in the table, in graded-lexicographic order.
    pub fn indices(&self) -> Vec<Vec<u32>> {
        let mut idx: Vec<Vec<u32>> = (0..self.data.len())
            .map(|i| self.unflat(i))
            .filter(|r| self.cap.is_none_or(|c| r.iter().sum::<u32>() <= c))
            .collect();
        idx.sort_by(|a, b| {
            a.iter()
                .sum::<u32>()
                .cmp(&b.iter().sum::<u32>())
                .then_with(|| b.cmp(a))
        });
        idx
    }
}

/// Coefficients of `G/H` on the box `0 <= r <= shape`.
pub fn coefficients_box(g: &MPoly, h: &MPoly, shape: &[u32]) -> Result<SeriesTable> {
    coefficients_capped(g, h, shape, None)
}

/// Coefficients of `G/H` for all `r` of total degree at most `max_total`.
pub fn coefficients_total_degree(g: &MPoly, h: &MPoly, max_total: u32) -> Result<SeriesTable> {
    let shape = vec![max_total; h.nvars()];
    coefficients_capped(g, h, &shape, Some(max_total))
}

fn coefficients_capped(
    g: &MPoly,
    h: &MPoly,
    shape: &[u32],
    cap: Option<u32>,
) -> Result<SeriesTable> {
    let nvars = h.nvars();
    if g.nvars() != nvars {
        return Err(Error::DimensionMismatch {
            expected: nvars,
            got: g.nvars(),
        });
    }
    if shape.len() != nvars {
        return Err(Error::DimensionMismatch {
            expected: nvars,
            got: shape.len(),
        });
    }
    let h0q = h.constant_term();
    if h0q.is_zero() {
        return Err(Error::NotAnalyticAtOrigin);
    }

    // Integral representatives: H_int = lambda H, G_int = mu G.
    let lambda = Q::from_integer(h.denominator_lcm());
    let mu = Q::from_integer(g.denominator_lcm());
    let hi = h.scale(&lambda);
    let gi = g.scale(&mu);
    let h0 = hi.constant_term().to_integer();

    let strides = SeriesTable::strides_for(shape);
    let len: usize = shape.iter().map(|&s| s as usize + 1).product();
    let max_deg = cap.unwrap_or_else(|| shape.iter().sum());

    let mut h0_pow: Vec<BigInt> = Vec::with_capacity(max_deg as usize + 2);
    h0_pow.push(BigInt::one());
    for k in 1..=(max_deg as usize + 1) {
        let next = &h0_pow[k - 1] * &h0;
        h0_pow.push(next);
    }

    // Terms k != 0 of H that fit in the box, with weight h_k h0^{|k|-1}.
    let hterms: Vec<(Vec<u32>, usize, BigInt)> = hi
        .terms()
        .filter(|(m, _)| !m.is_one())
        .filter(|(m, _)| m.0.iter().zip(shape).all(|(a, b)| a <= b))
        .map(|(m, c)| {
            let off = m.0.iter().zip(&strides).map(|(&a, &s)| a as usize * s).sum();
            let deg = m.total_degree() as usize;
            (m.0.clone(), off, c.to_integer() * &h0_pow[deg - 1])
        })
        .collect();

    let unflat = |mut idx: usize| -> Vec<u32> {
        strides
            .iter()
            .map(|&s| {
                let e = idx / s;
                idx %= s;
                e as u32
            })
            .collect()
    };

    // Bucket indices by total degree; entries of one degree are independent.
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); max_deg as usize + 1];
    for idx in 0..len {
        let deg: u32 = unflat(idx).iter().sum();
        if deg <= max_deg {
            layers[deg as usize].push(idx);
        }
    }

    let mut b: Vec<BigInt> = vec![BigInt::zero(); len];
    for (deg, layer) in layers.iter().enumerate() {
        let values: Vec<BigInt> = layer
            .par_iter()
            .map(|&idx| {
                let r = unflat(idx);
                let mut acc = match gi.terms.get(&Monomial(r.clone())) {
                    Some(c) => c.to_integer() * &h0_pow[deg],
                    None => BigInt::zero(),
                };
                for (k, off, w) in &hterms {
                    if k.iter().zip(&r).all(|(a, b)| a <= b) {
                        acc -= w * &b[idx - off];
                    }
                }
                acc
            })
            .collect();
        for (&idx, v) in layer.iter().zip(values) {
            b[idx] = v;
        }
    }

    // a_r = (lambda/mu) b_r / h0^{|r|+1}, stored unreduced with a positive
    // denominator.
    let scale = lambda / mu;
    let data: Vec<Q> = b
        .into_par_iter()
        .enumerate()
        .map(|(idx, br)| {
            let deg: u32 = unflat(idx).iter().sum();
            if deg > max_deg {
                return Q::zero();
            }
            let mut num = br * scale.numer();
            let mut den = scale.denom() * &h0_pow[deg as usize + 1];
            if den.is_negative() {
                num = -num;
                den = -den;
            }
            Q::new_raw(num, den)
        })
        .collect();

    Ok(SeriesTable {
        shape: shape.to_vec(),
        strides,
        cap,
        data,
    })
}

/// True iff `(sum a_r z^r) * H` agrees with `G` on every coefficient of the
/// table (truncation cannot reach them: the product at `r` only uses
/// indices `<= r`).
pub fn series_multiply_check(a: &SeriesTable, h: &MPoly, g: &MPoly) -> bool {
    if h.nvars() != a.shape.len() || g.nvars() != a.shape.len() {
        return false;
    }
    a.indices().par_iter().all(|r| {
        let mut acc = Q::zero();
        for (k, hk) in h.terms() {
            if k.0.iter().zip(r).all(|(x, y)| x <= y) {
                let rk: Vec<u32> = r.iter().zip(&k.0).map(|(x, y)| x - y).collect();
                match a.get_raw(&rk) {
                    Some(v) => acc += hk * v,
                    None => return false,
                }
            }
        }
        acc == g.coeff(&Monomial(r.clone()))
    })
}
