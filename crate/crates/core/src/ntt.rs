//! Number-theoretic transform over `Z/pZ` with a deterministically chosen prime.
//!
//! A plan for capacity `N` fixes a power-of-two transform length `L` with
//! `2N <= L < 4N`, the smallest prime `p = 1 (mod L)` found by sieving the
//! residue class `1 + mL`, and a root `q` of multiplicative order exactly `L`.
//! Every power-of-two length `l` dividing `L` reuses `q^(L/l)` as its root, so
//! one plan serves all acyclic convolutions of inputs no longer than `N`.
//!
//! All residues are kept canonical in `[0, p)`. Convolution results are exact
//! whenever the true integer values are below `p`.

use crate::error::{Error, Result};

/// Below this many terms on the shorter side the direct product beats three transforms.
const DIRECT_CONV_THRESHOLD: usize = 32;

/// Number of `m` values examined per segment of the residue-class sieve.
const SIEVE_SEGMENT: u64 = 1 << 14;

/// Moduli are kept below `2^62` so that `a + b` never overflows a `u64`.
const MAX_MODULUS: u64 = 1 << 62;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        a * b % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Primes in `[2, limit]`, ascending.
pub fn sieve_small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

fn isqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

fn check_power_of_two(len: u64, what: &str) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!("{what} {len} is not a power of two")));
    }
    Ok(len.trailing_zeros())
}

/// Initial search window `2 (L log2 L)^2` for the prime modulus of transform length `L`.
pub fn prime_search_bound(transform_len: u64) -> Result<u64> {
    let log = check_power_of_two(transform_len, "transform length")? as u64;
    transform_len
        .checked_mul(log)
        .and_then(|x| x.checked_mul(x))
        .and_then(|x| x.checked_mul(2))
        .ok_or_else(|| {
            Error::capacity(format!("prime search bound overflows for L = {transform_len}"))
        })
}

/// Smallest prime `p = 1 (mod L)`.
///
/// Sieves the candidates `1 + mL` segment by segment with the small primes up
/// to the square root of the segment's largest candidate. Each small prime
/// `r` strikes the class `m = -L^{-1} (mod r)`. If the window `2 (L log2 L)^2`
/// runs dry the window is doubled and the search continues.
pub fn find_modulus(transform_len: u64) -> Result<u64> {
    let l = transform_len;
    if l < 2 {
        return Err(Error::invalid(format!("transform length {l} must be at least 2")));
    }
    let mut bound = prime_search_bound(l)?;
    let mut small: Vec<u64> = Vec::new();
    let mut small_limit = 1u64;
    let mut m_lo = 1u64;
    loop {
        let m_max = (bound - 1) / l;
        while m_lo <= m_max {
            let m_hi = (m_lo + SIEVE_SEGMENT - 1).min(m_max);
            let hi_val = 1 + m_hi * l;
            if hi_val >= MAX_MODULUS {
                return Err(Error::capacity(format!(
                    "no prime = 1 (mod {l}) below 2^62"
                )));
            }
            let root = isqrt(hi_val);
            if root > small_limit {
                small_limit = root.max(small_limit * 2);
                small = sieve_small_primes(small_limit);
            }
            let mut composite = vec![false; (m_hi - m_lo + 1) as usize];
            // 1 + mL is odd, so 2 never strikes anything.
            for &r in small.iter().skip(1).take_while(|&&r| r <= root) {
                let l_inv = inv_mod(l % r, r).expect("odd prime is coprime to a power of two");
                let class = (r - l_inv) % r;
                let mut m = m_lo + (class + r - m_lo % r) % r;
                while m <= m_hi {
                    if 1 + m * l != r {
                        composite[(m - m_lo) as usize] = true;
                    }
                    m += r;
                }
            }
            if let Some(pos) = composite.iter().position(|&c| !c) {
                return Ok(1 + (m_lo + pos as u64) * l);
            }
            m_lo = m_hi + 1;
        }
        bound = bound.checked_mul(2).ok_or_else(|| {
            Error::capacity(format!("prime search bound overflows for L = {l}"))
        })?;
    }
}

/// `p - 1 = odd_part * 2^two_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactoredOrder {
    pub odd_part: u64,
    pub two_exponent: u32,
}

impl FactoredOrder {
    pub fn of_prime(p: u64) -> Self {
        let two_exponent = (p - 1).trailing_zeros();
        FactoredOrder {
            odd_part: (p - 1) >> two_exponent,
            two_exponent,
        }
    }
}

/// A residue of multiplicative order exactly `L` modulo the prime `p`.
///
/// Scans `g = 2, 3, ...`; `g^o` (with `o` the odd part of `p - 1`) has order
/// `2^r` exactly when `g` is a quadratic nonresidue. The repeated squaring that
/// checks this also produces `(g^o)^(2^(r-t))`, which has order `2^t = L`.
pub fn find_root(p: u64, transform_len: u64) -> Result<u64> {
    let t = check_power_of_two(transform_len, "transform length")?;
    if p < 3 || (p - 1) % transform_len != 0 {
        return Err(Error::invalid(format!(
            "transform length {transform_len} does not divide p - 1 for p = {p}"
        )));
    }
    if t == 0 {
        return Ok(1);
    }
    let FactoredOrder {
        odd_part,
        two_exponent: r,
    } = FactoredOrder::of_prime(p);
    for g in 2..p {
        let mut y = pow_mod(g, odd_part, p);
        let mut byproduct = 0;
        // y runs through g^(o 2^s) for s = 0 .. r-1.
        for s in 0..r {
            if s == r - t {
                byproduct = y;
            }
            if s + 1 < r {
                y = mul_mod(y, y, p);
            }
        }
        if y == p - 1 {
            let root = byproduct;
            if pow_mod(root, transform_len, p) == 1 && pow_mod(root, transform_len / 2, p) != 1 {
                return Ok(root);
            }
            unreachable!("order check of a nonresidue power failed; is {p} prime?");
        }
    }
    Err(Error::invalid(format!("no quadratic nonresidue modulo {p}; it is not prime")))
}

/// Modulus, root and twiddle tables for every convolution of inputs no longer than `capacity`.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct NttPlan {
    capacity: usize,
    transform_len: usize,
    log_len: u32,
    modulus: u64,
    root: u64,
    /// `root^t` for `t < L/2`.
    powers: Vec<u64>,
    /// `root^-t` for `t < L/2`.
    inv_powers: Vec<u64>,
}

/// Builds the plan for inputs of length at most `capacity`.
pub fn make_plan(capacity: usize) -> Result<NttPlan> {
    NttPlan::new(capacity)
}

impl NttPlan {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid("plan capacity must be positive"));
        }
        let transform_len = capacity
            .checked_mul(2)
            .and_then(usize::checked_next_power_of_two)
            .filter(|&l| l <= 1 << 40)
            .ok_or_else(|| Error::capacity(format!("plan capacity {capacity} is too large")))?;
        let l = transform_len as u64;
        let modulus = find_modulus(l)?;
        let root = find_root(modulus, l)?;
        let half = transform_len / 2;
        let mut powers = Vec::with_capacity(half);
        let mut inv_powers = Vec::with_capacity(half);
        let root_inv = pow_mod(root, modulus - 2, modulus);
        let (mut w, mut wi) = (1u64, 1u64);
        for _ in 0..half {
            powers.push(w);
            inv_powers.push(wi);
            w = mul_mod(w, root, modulus);
            wi = mul_mod(wi, root_inv, modulus);
        }
        Ok(NttPlan {
            capacity,
            transform_len,
            log_len: transform_len.trailing_zeros(),
            modulus,
            root,
            powers,
            inv_powers,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn transform_len(&self) -> usize {
        self.transform_len
    }

    pub fn log_len(&self) -> u32 {
        self.log_len
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Root of order exactly [`transform_len`](Self::transform_len).
    pub fn root(&self) -> u64 {
        self.root
    }

    /// Root of order exactly `len` (a power of two dividing the transform length).
    pub fn root_of_len(&self, len: usize) -> Result<u64> {
        self.check_transform_len(len)?;
        Ok(pow_mod(self.root, (self.transform_len / len) as u64, self.modulus))
    }

    fn check_transform_len(&self, len: usize) -> Result<()> {
        check_power_of_two(len as u64, "sequence length")?;
        if len > self.transform_len {
            return Err(Error::capacity(format!(
                "sequence length {len} exceeds transform length {}",
                self.transform_len
            )));
        }
        Ok(())
    }

    pub(crate) fn check_reduced(&self, values: &[u64]) -> Result<()> {
        match values.iter().find(|&&v| v >= self.modulus) {
            Some(v) => Err(Error::invalid(format!(
                "residue {v} is not reduced modulo {}",
                self.modulus
            ))),
            None => Ok(()),
        }
    }

    pub(crate) fn check_capacity(&self, len: usize) -> Result<()> {
        if len > self.capacity {
            return Err(Error::capacity(format!(
                "sequence length {len} exceeds plan capacity N = {}",
                self.capacity
            )));
        }
        Ok(())
    }

    /// Evaluation at the powers of the order-`len` root: `y_k = sum_i x_i w^(ik)`.
    pub fn forward(&self, x: &[u64]) -> Result<Vec<u64>> {
        self.check_transform_len(x.len())?;
        self.check_reduced(x)?;
        let mut y = x.to_vec();
        self.transform(&mut y, &self.powers);
        Ok(y)
    }

    pub fn inverse(&self, y: &[u64]) -> Result<Vec<u64>> {
        self.check_transform_len(y.len())?;
        self.check_reduced(y)?;
        let mut x = y.to_vec();
        self.inverse_in_place(&mut x);
        Ok(x)
    }

    fn inverse_in_place(&self, x: &mut [u64]) {
        self.transform(x, &self.inv_powers);
        let p = self.modulus;
        let scale = pow_mod(x.len() as u64, p - 2, p);
        for v in x.iter_mut() {
            *v = mul_mod(*v, scale, p);
        }
    }

    /// In-place iterative radix-2 transform; `table[t]` is the `t`-th power of
    /// the (possibly inverted) order-`L` root.
    fn transform(&self, x: &mut [u64], table: &[u64]) {
        let n = x.len();
        if n <= 1 {
            return;
        }
        let p = self.modulus;
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                x.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = self.transform_len / len;
            for block in x.chunks_exact_mut(len) {
                let (lo, hi) = block.split_at_mut(half);
                for (j, (u, v)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = mul_mod(*v, table[j * stride], p);
                    *v = sub_mod(*u, t, p);
                    *u = add_mod(*u, t, p);
                }
            }
            len *= 2;
        }
    }

    /// Acyclic convolution `c_k = sum_{i+j=k} a_i b_j (mod p)`.
    ///
    /// Short inputs are multiplied directly; everything else goes through the
    /// transform.
    pub fn conv_acyclic(&self, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
        self.check_inputs(a, b)?;
        Ok(self.convolve(a, b))
    }

    /// As [`conv_acyclic`](Self::conv_acyclic) but always through the transform.
    pub fn conv_acyclic_ntt(&self, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
        self.check_inputs(a, b)?;
        Ok(self.convolve_ntt(a, b))
    }

    fn check_inputs(&self, a: &[u64], b: &[u64]) -> Result<()> {
        self.check_capacity(a.len())?;
        self.check_capacity(b.len())?;
        self.check_reduced(a)?;
        self.check_reduced(b)
    }

    /// Unchecked convolution; callers guarantee lengths `<= capacity` and reduced inputs.
    pub(crate) fn convolve(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        if a.len().min(b.len()) <= DIRECT_CONV_THRESHOLD {
            self.convolve_direct(a, b)
        } else {
            self.convolve_ntt(a, b)
        }
    }

    fn convolve_direct(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.modulus;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (o, &bj) in out[i..].iter_mut().zip(b) {
                *o = add_mod(*o, mul_mod(ai, bj, p), p);
            }
        }
        out
    }

    fn convolve_ntt(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p = self.modulus;
        let out_len = a.len() + b.len() - 1;
        let size = out_len.next_power_of_two();
        debug_assert!(size <= self.transform_len);
        let mut fa = a.to_vec();
        fa.resize(size, 0);
        let mut fb = b.to_vec();
        fb.resize(size, 0);
        self.transform(&mut fa, &self.powers);
        self.transform(&mut fb, &self.powers);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = mul_mod(*x, *y, p);
        }
        self.inverse_in_place(&mut fa);
        fa.truncate(out_len);
        fa
    }
}

pub fn ntt_forward(x: &[u64], plan: &NttPlan) -> Result<Vec<u64>> {
    plan.forward(x)
}

pub fn ntt_inverse(y: &[u64], plan: &NttPlan) -> Result<Vec<u64>> {
    plan.inverse(y)
}

pub fn conv_acyclic(a: &[u64], b: &[u64], plan: &NttPlan) -> Result<Vec<u64>> {
    plan.conv_acyclic(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(v: u64) -> bool {
        v >= 2 && (2..).take_while(|d| d * d <= v).all(|d| v % d != 0)
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_small_primes(10), vec![2, 3, 5, 7]);
        assert_eq!(sieve_small_primes(2), vec![2]);
        assert!(sieve_small_primes(1).is_empty());
        let hundred = sieve_small_primes(100);
        let oracle: Vec<u64> = (2..=100).filter(|&v| is_prime_trial(v)).collect();
        assert_eq!(hundred, oracle);
        assert_eq!(hundred.len(), 25);
        assert_eq!(*hundred.last().unwrap(), 97);
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(find_modulus(2).unwrap(), 3);
        assert_eq!(find_modulus(16).unwrap(), 17);
        assert_eq!(find_modulus(256).unwrap(), 257);
        assert!(find_modulus(12).is_err());
        assert!(find_modulus(1).is_err());
    }

    #[test]
    fn modulus_is_smallest_in_class() {
        for t in 1..=20 {
            let l = 1u64 << t;
            let p = find_modulus(l).unwrap();
            let oracle = (1..).map(|m| 1 + m * l).find(|&v| is_prime_trial(v)).unwrap();
            assert_eq!(p, oracle, "L = {l}");
            assert!(p < prime_search_bound(l).unwrap());
        }
    }

    #[test]
    fn root_examples() {
        assert_eq!(find_root(17, 16).unwrap(), 3);
        assert_eq!(find_root(17, 4).unwrap(), 13);
        assert_eq!(find_root(3, 2).unwrap(), 2);
        assert!(find_root(17, 32).is_err());
        assert!(find_root(17, 6).is_err());
    }

    #[test]
    fn factored_order() {
        let f = FactoredOrder::of_prime(12289);
        assert_eq!(f.odd_part, 3);
        assert_eq!(f.two_exponent, 12);
        assert_eq!(f.odd_part * (1 << f.two_exponent) + 1, 12289);
    }

    #[test]
    fn plan_examples() {
        let plan = make_plan(8).unwrap();
        assert_eq!(plan.transform_len(), 16);
        assert_eq!(plan.modulus(), 17);
        assert_eq!(pow_mod(plan.root(), 16, 17), 1);
        assert_ne!(pow_mod(plan.root(), 8, 17), 1);

        let plan = make_plan(1).unwrap();
        assert_eq!((plan.transform_len(), plan.modulus(), plan.root()), (2, 3, 2));

        let plan = make_plan(1000).unwrap();
        assert_eq!(plan.transform_len(), 2048);
        let oracle = (1..).map(|m| 1 + m * 2048).find(|&v| is_prime_trial(v)).unwrap();
        assert_eq!(plan.modulus(), oracle);
        assert_eq!(plan.modulus() % 2048, 1);
        assert_eq!(pow_mod(plan.root(), 2048, plan.modulus()), 1);
        assert_ne!(pow_mod(plan.root(), 1024, plan.modulus()), 1);

        assert!(make_plan(0).is_err());
    }

    #[test]
    fn plan_length_window() {
        for n in 1..300usize {
            let l = make_plan(n).unwrap().transform_len();
            assert!(2 * n <= l && l < 4 * n, "N = {n}, L = {l}");
        }
    }

    #[test]
    fn forward_inverse_examples() {
        let plan = make_plan(8).unwrap();
        assert_eq!(plan.forward(&[1, 0, 0, 0]).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(plan.inverse(&[1, 1, 1, 1]).unwrap(), vec![1, 0, 0, 0]);
        assert!(plan.forward(&[1, 2, 3]).is_err());
        assert!(plan.forward(&[0; 32]).is_err());
        assert!(plan.forward(&[17, 0]).is_err());
    }

    #[test]
    fn forward_matches_definition() {
        let plan = make_plan(8).unwrap();
        let p = plan.modulus();
        let x = [3u64, 1, 4, 1, 5, 9, 2, 6];
        let w = plan.root_of_len(8).unwrap();
        let expected: Vec<u64> = (0..8u64)
            .map(|k| {
                x.iter().enumerate().fold(0, |acc, (i, &xi)| {
                    add_mod(acc, mul_mod(xi, pow_mod(w, i as u64 * k, p), p), p)
                })
            })
            .collect();
        assert_eq!(plan.forward(&x).unwrap(), expected);
    }

    #[test]
    fn conv_examples() {
        let plan = make_plan(16).unwrap();
        assert_eq!(plan.modulus(), 97);
        assert_eq!(plan.conv_acyclic(&[1, 2, 3], &[4, 5]).unwrap(), vec![4, 13, 22, 15]);
        assert_eq!(plan.conv_acyclic_ntt(&[1, 2, 3], &[4, 5]).unwrap(), vec![4, 13, 22, 15]);
        assert_eq!(plan.conv_acyclic(&[1], &[7]).unwrap(), vec![7]);
        assert!(plan.conv_acyclic(&[], &[7]).unwrap().is_empty());
        // Modulo 17 the middle coefficient wraps.
        let plan = make_plan(8).unwrap();
        assert_eq!(plan.conv_acyclic_ntt(&[1, 2, 3], &[4, 5]).unwrap(), vec![4, 13, 5, 15]);
        let err = plan.conv_acyclic(&[0; 9], &[1]).unwrap_err();
        assert!(err.to_string().contains("N = 8"), "{err}");
    }

    #[test]
    fn inv_mod_matches_definition() {
        for m in [3u64, 17, 97, 12289] {
            for a in 1..m.min(200) {
                let inv = inv_mod(a, m).unwrap();
                assert_eq!(a * inv % m, 1);
            }
        }
        assert_eq!(inv_mod(4, 8), None);
    }

    #[test]
    fn large_modulus_path() {
        let p = (1u64 << 61) - 1;
        assert_eq!(mul_mod(p - 1, p - 1, p), 1);
        assert_eq!(mul_mod(1 << 40, 1 << 40, p), 1 << 19);
        assert_eq!(pow_mod(2, 61, p), 1);
    }
}
