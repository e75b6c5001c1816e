//! Arithmetic-progression patterns in strings.
//!
//! Positions are 1-indexed throughout. A 3-sub-cadence `(i, d)` has
//! `S[i] = S[i+d] = S[i+2d]`; a `k`-cadence additionally cannot be extended
//! (`i - d <= 0` and `n < i + kd`); an `(a,b,c)`-partial-`k`-cadence keeps
//! the `k`-cadence frame but only requires equality at offsets `a`, `b`, `c`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, RatPoint, Rational};
use crate::ntt::NttPlan;
use crate::oracle::{validate_hit, HitKind};
use crate::polyconv::conv_polygon;

/// A byte string with an occurrence index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    bytes: Vec<u8>,
    occurrences: BTreeMap<u8, Vec<usize>>,
}

impl Text {
    pub fn new(bytes: Vec<u8>) -> Self {
        let mut occurrences: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
        for (i, &c) in bytes.iter().enumerate() {
            occurrences.entry(c).or_default().push(i + 1);
        }
        Text { bytes, occurrences }
    }

    /// File contents with the trailing line break removed.
    pub fn from_file_bytes(raw: &[u8]) -> Self {
        let mut end = raw.len();
        while end > 0 && matches!(raw[end - 1], b'\n' | b'\r') {
            end -= 1;
        }
        Text::new(raw[..end].to_vec())
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// `S[i]` for `1 <= i <= n`.
    pub fn at(&self, i: usize) -> u8 {
        self.bytes[i - 1]
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        i.checked_sub(1).and_then(|i| self.bytes.get(i)).copied()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Sorted positions of `sigma`.
    pub fn occurrences(&self, sigma: u8) -> &[usize] {
        self.occurrences.get(&sigma).map_or(&[], Vec::as_slice)
    }

    /// Distinct characters in increasing order.
    pub fn alphabet(&self) -> impl Iterator<Item = u8> + '_ {
        self.occurrences.keys().copied()
    }

    /// Each byte replaced by its rank among the distinct bytes.
    pub fn with_sorted_alphabet(&self) -> Text {
        let rank: BTreeMap<u8, u8> = self
            .alphabet()
            .enumerate()
            .map(|(r, c)| (c, r as u8))
            .collect();
        Text::new(self.bytes.iter().map(|c| rank[c]).collect())
    }

    pub fn reversed(&self) -> Text {
        Text::new(self.bytes.iter().rev().copied().collect())
    }
}

impl From<&str> for Text {
    fn from(s: &str) -> Self {
        Text::new(s.as_bytes().to_vec())
    }
}

impl From<&[u8]> for Text {
    fn from(s: &[u8]) -> Self {
        Text::new(s.to_vec())
    }
}

/// `delta[i] = 1` iff `S[i] = sigma`, for `0 <= i <= n`; `delta[0] = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorSeq {
    values: Vec<u64>,
}

impl IndicatorSeq {
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

pub fn indicator(text: &Text, sigma: u8) -> IndicatorSeq {
    let mut values = vec![0u64; text.len() + 1];
    for &i in text.occurrences(sigma) {
        values[i] = 1;
    }
    IndicatorSeq { values }
}

/// Per-middle-position counts: `s[k]` sub-cadences have their second
/// occurrence at `k`. Index 0 is unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubCadenceCounts {
    pub s: Vec<u64>,
    pub total: u64,
}

/// Per-position counts of partial cadences by the position `z = i + cd` of
/// the third offset. Index 0 is unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialCadenceCounts {
    pub per_z: Vec<u64>,
    pub total: u64,
}

/// Counts for each character present, and their sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharCounts<C> {
    pub per_char: Vec<(u8, C)>,
    pub total: u64,
}

impl<C> CharCounts<C> {
    pub fn get(&self, sigma: u8) -> Option<&C> {
        self.per_char.iter().find(|(c, _)| *c == sigma).map(|(_, v)| v)
    }
}

/// Offsets `a < b` and `c` of a partial cadence of length `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialCadenceSpec {
    a: usize,
    b: usize,
    c: usize,
    k: usize,
}

impl PartialCadenceSpec {
    pub fn new(a: usize, b: usize, c: usize, k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid(format!("cadence length k = {k} must be at least 3")));
        }
        if !(a < b && b < k && c < k && c != a && c != b) {
            return Err(Error::invalid(format!(
                "offsets ({a},{b},{c}) need a < b and c distinct from both, all below k = {k}"
            )));
        }
        Ok(PartialCadenceSpec { a, b, c, k })
    }

    /// `(0,1,2)` with `k = 3`: plain 3-cadences.
    pub fn three_cadence() -> Self {
        PartialCadenceSpec { a: 0, b: 1, c: 2, k: 3 }
    }

    /// All valid specs of length `k` in lexicographic `(a, b, c)` order.
    pub fn all_for(k: usize) -> Result<Vec<Self>> {
        if k < 3 {
            return Err(Error::invalid(format!("cadence length k = {k} must be at least 3")));
        }
        let mut out = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                for c in (0..k).filter(|&c| c != a && c != b) {
                    out.push(PartialCadenceSpec { a, b, c, k });
                }
            }
        }
        Ok(out)
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The spec matching the same cadences in the reversed text.
    pub fn reversed(&self) -> Self {
        let k = self.k;
        PartialCadenceSpec {
            a: k - 1 - self.b,
            b: k - 1 - self.a,
            c: k - 1 - self.c,
            k,
        }
    }
}

impl fmt::Display for PartialCadenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Start position `i` and common difference `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CadenceHit {
    pub i: usize,
    pub d: usize,
}

impl fmt::Display for CadenceHit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.d)
    }
}

/// Which counting path a per-character driver takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// Occurrence pairs for rare characters, convolution otherwise.
    #[default]
    Auto,
    Rare,
    Convolution,
}

fn log2(n: usize) -> f64 {
    (n.max(1) as f64).log2()
}

fn use_rare(branch: Branch, n_sigma: usize, budget: f64) -> bool {
    match branch {
        Branch::Rare => true,
        Branch::Convolution => false,
        Branch::Auto => (n_sigma as f64) * (n_sigma as f64) <= budget,
    }
}

/// Plan capacity needed by the sub-cadence convolution path.
pub fn required_capacity_subcadences(n: usize) -> usize {
    n + 1
}

/// Plan capacity needed by the partial-cadence convolution path.
pub fn required_capacity_partial(n: usize, spec: &PartialCadenceSpec) -> usize {
    let m = spec.b - spec.a;
    let stretch = spec.b.abs_diff(spec.c).max(spec.c.abs_diff(spec.a));
    stretch * (n / m) + 1
}

/// Capacity covering every spec of length `k`.
pub fn required_capacity_error_cadences(n: usize, k: usize) -> Result<usize> {
    Ok(PartialCadenceSpec::all_for(k)?
        .iter()
        .map(|s| required_capacity_partial(n, s))
        .max()
        .unwrap_or(1))
}

/// Sub-cadences of `sigma` via the self-convolution of its indicator.
pub fn count_3subcadences_char(text: &Text, sigma: u8, plan: &NttPlan) -> Result<SubCadenceCounts> {
    let n = text.len();
    plan.check_capacity(required_capacity_subcadences(n))?;
    let delta = indicator(text, sigma);
    let c = plan.convolve(delta.values(), delta.values());
    let mut s = vec![0u64; n + 1];
    for &k in text.occurrences(sigma) {
        // c_{2k} counts ordered pairs around k, including (k, k) itself.
        s[k] = (c[2 * k] - 1) / 2;
    }
    let total = s.iter().sum();
    Ok(SubCadenceCounts { s, total })
}

/// Same counts from all pairs of occurrences.
pub fn count_3subcadences_char_rare(text: &Text, sigma: u8) -> SubCadenceCounts {
    let n = text.len();
    let occ = text.occurrences(sigma);
    let mut s = vec![0u64; n + 1];
    for (t, &x) in occ.iter().enumerate() {
        for &y in &occ[t + 1..] {
            if (x + y) % 2 == 0 && text.at((x + y) / 2) == sigma {
                s[(x + y) / 2] += 1;
            }
        }
    }
    let total = s.iter().sum();
    SubCadenceCounts { s, total }
}

pub fn count_3subcadences_all(
    text: &Text,
    plan: &NttPlan,
    branch: Branch,
) -> Result<CharCounts<SubCadenceCounts>> {
    let n = text.len();
    let budget = n as f64 * log2(n);
    let mut per_char = Vec::new();
    let mut total = 0;
    for sigma in text.alphabet() {
        let counts = if use_rare(branch, text.occurrences(sigma).len(), budget) {
            count_3subcadences_char_rare(text, sigma)
        } else {
            count_3subcadences_char(text, sigma, plan)?
        };
        total += counts.total;
        per_char.push((sigma, counts));
    }
    Ok(CharCounts { per_char, total })
}

/// The first `o` sub-cadences of `sigma`, by middle position then start.
pub fn enumerate_3subcadences(
    text: &Text,
    sigma: u8,
    counts: &SubCadenceCounts,
    o: u64,
) -> Result<Vec<CadenceHit>> {
    if o > counts.total {
        return Err(Error::invalid(format!(
            "requested {o} hits but only {} exist",
            counts.total
        )));
    }
    let n = text.len();
    let mut hits = Vec::with_capacity(o as usize);
    for (k, &sk) in counts.s.iter().enumerate().skip(1) {
        if hits.len() as u64 == o {
            break;
        }
        if sk == 0 {
            continue;
        }
        for i in (1..k).filter(|&i| 2 * k - i <= n) {
            if text.at(i) == sigma && text.at(k) == sigma && text.at(2 * k - i) == sigma {
                let hit = CadenceHit { i, d: k - i };
                debug_assert!(validate_hit(text, HitKind::SubCadence, hit));
                hits.push(hit);
                if hits.len() as u64 == o {
                    break;
                }
            }
        }
    }
    if (hits.len() as u64) < o {
        return Err(Error::invalid("counts do not match the text"));
    }
    Ok(hits)
}

fn frac(num: i64, den: i64) -> Result<Rational> {
    Rational::new(num, den)
}

/// The quadrilateral of `(x, y) = (i + ad, i + bd)` over all partial-cadence
/// frames `(i, d)` of a text of length `n`.
pub fn partial_cadence_quadrilateral(n: usize, spec: &PartialCadenceSpec) -> Result<ConvexPolygon> {
    if n == 0 {
        return Err(Error::invalid("text length must be positive"));
    }
    let (a, b, k, n) = (spec.a as i64, spec.b as i64, spec.k as i64, n as i64);
    let corner = |sa: i64, sb: i64, den: i64| -> Result<RatPoint> {
        Ok(RatPoint::new(frac(sa * n, den)?, frac(sb * n, den)?))
    };
    let vertices = vec![
        corner(a, b, k)?,
        corner(a + 1, b + 1, k + 1)?,
        corner(a + 1, b + 1, k)?,
        corner(a, b, k - 1)?,
    ];
    // Only C and the edges BC, CD are included.
    ConvexPolygon::new(
        vertices,
        vec![false, true, true, false],
        vec![false, false, true, false],
    )
    .map_err(|e| match e {
        Error::Polygon(v) => Error::Shape(format!("degenerate partial-cadence quadrilateral: {v}")),
        other => other,
    })
}

/// Partial cadences of `spec` with character `sigma`, via polygon convolution
/// on each residue class of positions modulo `b - a`.
pub fn count_partial_cadences_char(
    text: &Text,
    sigma: u8,
    spec: &PartialCadenceSpec,
    plan: &NttPlan,
) -> Result<PartialCadenceCounts> {
    let n = text.len();
    let mut per_z = vec![0u64; n + 1];
    if n == 0 {
        return Ok(PartialCadenceCounts { per_z, total: 0 });
    }
    plan.check_capacity(required_capacity_partial(n, spec))?;
    let quad = partial_cadence_quadrilateral(n, spec)?;
    let delta = indicator(text, sigma);
    let delta = delta.values();
    let m = (spec.b - spec.a) as i64;
    let e1 = spec.b as i64 - spec.c as i64;
    let e2 = spec.c as i64 - spec.a as i64;
    for rho in 0..(m as usize).min(n + 1) {
        // Positions rho, rho + m, ... compressed to t = 0, 1, ...
        let class: Vec<u64> = delta[rho..].iter().step_by(m as usize).copied().collect();
        if class.iter().all(|&v| v == 0) {
            continue;
        }
        let last = class.len() as i64 - 1;
        // Stretch by e, reflecting when e < 0 so indices stay non-negative.
        let stretch = |e: i64| -> (Vec<u64>, i64) {
            let shift = if e < 0 { -e * last } else { 0 };
            let mut out = vec![0u64; (e.abs() * last + 1) as usize];
            for (t, &v) in class.iter().enumerate() {
                out[(shift + e * t as i64) as usize] = v;
            }
            (out, shift)
        };
        let (sa, t1) = stretch(e1);
        let (sb, t2) = stretch(e2);
        let map = |c: Rational, e: i64, shift: i64| -> Result<Rational> {
            let r = Rational::integer(rho as i64);
            c.checked_sub(r)
                .and_then(|v| v.checked_mul(frac(e, m).ok()?))
                .and_then(|v| v.checked_add(Rational::integer(shift)))
                .ok_or_else(|| Error::capacity("partial-cadence polygon coordinates overflow"))
        };
        let vertices = quad
            .vertices()
            .iter()
            .map(|p| Ok(RatPoint::new(map(p.x, e1, t1)?, map(p.y, e2, t2)?)))
            .collect::<Result<Vec<_>>>()?;
        let poly = ConvexPolygon::new(
            vertices,
            quad.edge_included().to_vec(),
            quad.vertex_included().to_vec(),
        )?;
        let sums = conv_polygon(&sa, &sb, &poly, plan)?;
        for (s, v) in sums.iter() {
            if v == 0 {
                continue;
            }
            let z = s - t1 - t2 + rho as i64;
            if z >= 1 && z <= n as i64 && delta[z as usize] == 1 {
                per_z[z as usize] += v;
            }
        }
    }
    let total = per_z.iter().sum();
    Ok(PartialCadenceCounts { per_z, total })
}

/// Same counts from all pairs of occurrences at offsets `a` and `b`.
pub fn count_partial_cadences_char_rare(
    text: &Text,
    sigma: u8,
    spec: &PartialCadenceSpec,
) -> PartialCadenceCounts {
    let n = text.len();
    let (a, b, c, k) = (spec.a, spec.b, spec.c, spec.k);
    let m = b - a;
    let occ = text.occurrences(sigma);
    let mut per_z = vec![0u64; n + 1];
    for (t, &x) in occ.iter().enumerate() {
        for &y in &occ[t + 1..] {
            if (y - x) % m != 0 {
                continue;
            }
            let d = (y - x) / m;
            let Some(i) = x.checked_sub(a * d).filter(|&i| i >= 1) else {
                continue;
            };
            if i <= d && i + (k - 1) * d <= n && n < i + k * d {
                let z = i + c * d;
                if text.at(z) == sigma {
                    per_z[z] += 1;
                }
            }
        }
    }
    let total = per_z.iter().sum();
    PartialCadenceCounts { per_z, total }
}

pub fn count_partial_cadences_all(
    text: &Text,
    spec: &PartialCadenceSpec,
    plan: &NttPlan,
    branch: Branch,
) -> Result<CharCounts<PartialCadenceCounts>> {
    let n = text.len();
    let budget = n as f64 * log2(n) * log2(n);
    let mut per_char = Vec::new();
    let mut total = 0;
    for sigma in text.alphabet() {
        let counts = if use_rare(branch, text.occurrences(sigma).len(), budget) {
            count_partial_cadences_char_rare(text, sigma, spec)
        } else {
            count_partial_cadences_char(text, sigma, spec, plan)?
        };
        total += counts.total;
        per_char.push((sigma, counts));
    }
    Ok(CharCounts { per_char, total })
}

/// The first `o` partial cadences by `z`, then by `x = i + ad`.
pub fn enumerate_partial_cadences(
    text: &Text,
    spec: &PartialCadenceSpec,
    counts: &PartialCadenceCounts,
    o: u64,
) -> Result<Vec<CadenceHit>> {
    if o > counts.total {
        return Err(Error::invalid(format!(
            "requested {o} hits but only {} exist",
            counts.total
        )));
    }
    let n = text.len() as i64;
    let (a, ca) = (spec.a as i64, spec.c as i64 - spec.a as i64);
    let mut hits = Vec::with_capacity(o as usize);
    'outer: for (z, &cz) in counts.per_z.iter().enumerate().skip(1) {
        if hits.len() as u64 == o {
            break;
        }
        if cz == 0 {
            continue;
        }
        let sigma = text.at(z);
        for &x in text.occurrences(sigma) {
            // z - x = (c - a) d
            let diff = z as i64 - x as i64;
            if diff % ca != 0 || diff / ca < 1 {
                continue;
            }
            let d = diff / ca;
            let i = x as i64 - a * d;
            if i < 1 || i > n {
                continue;
            }
            let hit = CadenceHit {
                i: i as usize,
                d: d as usize,
            };
            if validate_hit(text, HitKind::Partial(*spec), hit) {
                hits.push(hit);
                if hits.len() as u64 == o {
                    break 'outer;
                }
            }
        }
    }
    if (hits.len() as u64) < o {
        return Err(Error::invalid("counts do not match the text"));
    }
    Ok(hits)
}

/// 3-cadences: partial cadences of `(0,1,2)` with `k = 3`.
pub fn count_3cadences(
    text: &Text,
    plan: &NttPlan,
    branch: Branch,
) -> Result<CharCounts<PartialCadenceCounts>> {
    count_partial_cadences_all(text, &PartialCadenceSpec::three_cadence(), plan, branch)
}

/// First offset triple, in lexicographic order, with a nonzero partial-cadence
/// count; `None` if the text has no `k`-cadence with at most `k - 3` errors.
pub fn detect_error_cadences(
    text: &Text,
    k: usize,
    plan: &NttPlan,
) -> Result<Option<PartialCadenceSpec>> {
    for spec in PartialCadenceSpec::all_for(k)? {
        if count_partial_cadences_all(text, &spec, plan, Branch::Auto)?.total > 0 {
            return Ok(Some(spec));
        }
    }
    Ok(None)
}
