//! Brute-force references and seeded random instances.
//!
//! Everything here follows the definitions literally and is only meant for
//! cross-checking the fast paths on small inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cadence::{CadenceHit, PartialCadenceSpec, Text};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexPolygon, RatPoint, Rational};
use crate::ntt::{add_mod, mul_mod, NttPlan};
use crate::polyconv::DiagonalSums;

/// Default cap on the lattice bounding-box area of a polygon oracle call.
pub const DEFAULT_AREA_CAP: u128 = 10_000_000;
/// Default cap on the text length of a string oracle call.
pub const DEFAULT_TEXT_CAP: usize = 5000;

/// Size limits of the brute-force paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub area: u128,
    pub text_len: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            area: DEFAULT_AREA_CAP,
            text_len: DEFAULT_TEXT_CAP,
        }
    }
}

impl OracleCaps {
    /// Defaults, overridden by `POLYCONV_ORACLE_CAP=<area>[,<text_len>]`.
    pub fn from_env() -> Self {
        let mut caps = OracleCaps::default();
        if let Ok(v) = std::env::var("POLYCONV_ORACLE_CAP") {
            let mut parts = v.split(',').map(str::trim);
            if let Some(area) = parts.next().and_then(|s| s.parse().ok()) {
                caps.area = area;
            }
            if let Some(n) = parts.next().and_then(|s| s.parse().ok()) {
                caps.text_len = n;
            }
        }
        caps
    }

    fn check_text(&self, n: usize) -> Result<()> {
        if n > self.text_len {
            return Err(Error::capacity(format!(
                "text length {n} exceeds the oracle cap {}",
                self.text_len
            )));
        }
        Ok(())
    }
}

/// Definitional acyclic convolution modulo `p`.
pub fn schoolbook_conv(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x % p, y % p, p), p);
        }
    }
    out
}

/// Double loop over the lattice bounding box, testing every point.
pub fn conv_polygon_bruteforce(
    a: &[u64],
    b: &[u64],
    poly: &ConvexPolygon,
    plan: &NttPlan,
) -> Result<DiagonalSums> {
    conv_polygon_bruteforce_capped(a, b, poly, plan.modulus(), OracleCaps::from_env())
}

pub fn conv_polygon_bruteforce_capped(
    a: &[u64],
    b: &[u64],
    poly: &ConvexPolygon,
    p: u64,
    caps: OracleCaps,
) -> Result<DiagonalSums> {
    let bx = poly.bounding_box();
    if bx.area() > caps.area {
        return Err(Error::capacity(format!(
            "bounding box area {} exceeds the oracle cap {}",
            bx.area(),
            caps.area
        )));
    }
    let mut out = DiagonalSums::for_box(&bx, p);
    let at = |s: &[u64], i: i64| {
        usize::try_from(i)
            .ok()
            .and_then(|i| s.get(i))
            .map_or(0, |&v| v % p)
    };
    for i in bx.x_lo..=bx.x_hi {
        let ai = at(a, i);
        for j in bx.y_lo..=bx.y_hi {
            if poly.contains(i, j) {
                out.add_at(i + j, mul_mod(ai, at(b, j), p));
            }
        }
    }
    Ok(out)
}

/// Which definition [`validate_hit`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitKind {
    SubCadence,
    Cadence,
    Partial(PartialCadenceSpec),
}

/// Checks a hit against the definition of its kind.
pub fn validate_hit(text: &Text, kind: HitKind, hit: CadenceHit) -> bool {
    let n = text.len() as i64;
    let (i, d) = (hit.i as i64, hit.d as i64);
    if i < 1 || d < 1 {
        return false;
    }
    let same = |offsets: &[i64]| {
        let pos: Vec<i64> = offsets.iter().map(|&o| i + o * d).collect();
        if pos.iter().any(|&q| q > n) {
            return false;
        }
        let first = text.at(pos[0] as usize);
        pos.iter().all(|&q| text.at(q as usize) == first)
    };
    match kind {
        HitKind::SubCadence => same(&[0, 1, 2]),
        HitKind::Cadence => same(&[0, 1, 2]) && i - d <= 0 && n < i + 3 * d,
        HitKind::Partial(spec) => {
            let k = spec.k() as i64;
            i - d <= 0
                && i + (k - 1) * d <= n
                && n < i + k * d
                && same(&[spec.a() as i64, spec.b() as i64, spec.c() as i64])
        }
    }
}

/// Number of 3-sub-cadences of character `sigma`.
pub fn count_3subcadences_bruteforce(text: &Text, sigma: u8) -> Result<u64> {
    OracleCaps::from_env().check_text(text.len())?;
    let n = text.len();
    let mut total = 0;
    for d in 1..=n / 2 {
        for i in 1..=n.saturating_sub(2 * d) {
            if text.at(i) == sigma && text.at(i + d) == sigma && text.at(i + 2 * d) == sigma {
                total += 1;
            }
        }
    }
    Ok(total)
}

/// Every `(i, d)` meeting the boundary inequalities of a `k`-cadence.
fn cadence_frames(n: usize, k: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |d| {
        // i <= d, i + (k-1)d <= n, n < i + kd
        let lo = (n + 1).saturating_sub(k * d).max(1);
        let hi = d.min(n.saturating_sub((k - 1) * d));
        (lo..=hi).map(move |i| (i, d))
    })
}

/// Partial cadences of `spec` whose three characters all equal `sigma`.
pub fn count_partial_bruteforce_char(text: &Text, sigma: u8, spec: &PartialCadenceSpec) -> Result<u64> {
    OracleCaps::from_env().check_text(text.len())?;
    Ok(cadence_frames(text.len(), spec.k())
        .filter(|&(i, d)| {
            [spec.a(), spec.b(), spec.c()]
                .iter()
                .all(|&o| text.at(i + o * d) == sigma)
        })
        .count() as u64)
}

/// Partial cadences of `spec` over all characters.
pub fn count_partial_bruteforce(text: &Text, spec: &PartialCadenceSpec) -> Result<u64> {
    OracleCaps::from_env().check_text(text.len())?;
    Ok(cadence_frames(text.len(), spec.k())
        .filter(|&(i, d)| {
            validate_hit(text, HitKind::Partial(*spec), CadenceHit { i, d })
        })
        .count() as u64)
}

/// Number of 3-cadences over all characters.
pub fn count_3cadences_bruteforce(text: &Text) -> Result<u64> {
    count_partial_bruteforce(text, &PartialCadenceSpec::three_cadence())
}

/// First offset triple, in lexicographic order, with any partial cadence.
pub fn error_cadence_witness_bruteforce(text: &Text, k: usize) -> Result<Option<PartialCadenceSpec>> {
    OracleCaps::from_env().check_text(text.len())?;
    for spec in PartialCadenceSpec::all_for(k)? {
        let hit = cadence_frames(text.len(), k)
            .any(|(i, d)| validate_hit(text, HitKind::Partial(spec), CadenceHit { i, d }));
        if hit {
            return Ok(Some(spec));
        }
    }
    Ok(None)
}

/// Parameters of the random instance stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomInstanceConfig {
    pub seed: u64,
    pub max_vertices: usize,
    /// Coordinates are drawn from `[0, coord_bound]`.
    pub coord_bound: i64,
    pub den_bound: i64,
    pub seq_len: usize,
}

impl Default for RandomInstanceConfig {
    fn default() -> Self {
        RandomInstanceConfig {
            seed: 0,
            max_vertices: 12,
            coord_bound: 400,
            den_bound: 8,
            seq_len: 401,
        }
    }
}

/// A deterministic stream of polygons, sequences and texts.
pub struct InstanceGenerator {
    config: RandomInstanceConfig,
    rng: ChaCha8Rng,
}

impl InstanceGenerator {
    pub fn new(config: RandomInstanceConfig) -> Result<Self> {
        if config.max_vertices < 3
            || config.coord_bound < 1
            || config.den_bound < 1
            || config.seq_len < 1
        {
            return Err(Error::invalid(format!("bad instance config {config:?}")));
        }
        Ok(InstanceGenerator {
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        })
    }

    pub fn config(&self) -> &RandomInstanceConfig {
        &self.config
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn rational_in(&mut self, lo: f64, hi: f64) -> Rational {
        let bound = self.config.coord_bound as f64;
        let den = self.rng.random_range(1..=self.config.den_bound);
        let x = lo.clamp(0.0, bound) + self.rng.random::<f64>() * (hi.clamp(0.0, bound) - lo.clamp(0.0, bound));
        let num = ((x * den as f64).round() as i64).clamp(0, self.config.coord_bound * den);
        Rational::new(num, den).expect("nonzero denominator")
    }

    fn draw_points(&mut self) -> Vec<RatPoint> {
        let bound = self.config.coord_bound as f64;
        let count = self.rng.random_range(3..=3 * self.config.max_vertices);
        if self.rng.random_bool(0.5) {
            (0..count)
                .map(|_| RatPoint::new(self.rational_in(0.0, bound), self.rational_in(0.0, bound)))
                .collect()
        } else {
            // Points near an ellipse give hulls with many vertices.
            let cx = self.rng.random::<f64>() * bound;
            let cy = self.rng.random::<f64>() * bound;
            let rx = self.rng.random::<f64>() * bound / 2.0;
            let ry = self.rng.random::<f64>() * bound / 2.0;
            (0..count)
                .map(|_| {
                    let t = self.rng.random::<f64>() * std::f64::consts::TAU;
                    let s = 0.9 + 0.1 * self.rng.random::<f64>();
                    let x = cx + s * rx * t.cos();
                    let y = cy + s * ry * t.sin();
                    RatPoint::new(self.rational_in(x, x), self.rational_in(y, y))
                })
                .collect()
        }
    }

    /// Hull of random rational points, thinned to at most `max_vertices`,
    /// with random flags.
    pub fn next_polygon(&mut self) -> ConvexPolygon {
        loop {
            let pts = self.draw_points();
            let mut hull = convex_hull(&pts).expect("coordinates are within range");
            if hull.len() < 3 {
                continue;
            }
            while hull.len() > self.config.max_vertices {
                let drop = self.rng.random_range(0..hull.len());
                hull.remove(drop);
            }
            let k = hull.len();
            let edges = (0..k).map(|_| self.rng.random_bool(0.5)).collect();
            let verts = (0..k).map(|_| self.rng.random_bool(0.5)).collect();
            return ConvexPolygon::new(hull, edges, verts).expect("hull is strictly convex");
        }
    }

    /// `len` residues modulo `p`.
    pub fn next_sequence(&mut self, len: usize, p: u64) -> Vec<u64> {
        (0..len).map(|_| self.rng.random_range(0..p)).collect()
    }

    /// Random text of length `n` over the first `alphabet` lowercase letters.
    pub fn next_text(&mut self, n: usize, alphabet: u8) -> Text {
        let alphabet = alphabet.clamp(1, 26);
        let bytes: Vec<u8> = (0..n)
            .map(|_| b'a' + self.rng.random_range(0..alphabet))
            .collect();
        Text::new(bytes)
    }
}

/// First polygon of the stream seeded by `config`.
pub fn random_convex_polygon(config: &RandomInstanceConfig) -> Result<ConvexPolygon> {
    Ok(InstanceGenerator::new(*config)?.next_polygon())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schoolbook_examples() {
        assert_eq!(schoolbook_conv(&[1, 2, 3], &[4, 5], 17), vec![4, 13, 22 % 17, 15]);
        assert_eq!(schoolbook_conv(&[1, 2, 3], &[4, 5], 1_000_003), vec![4, 13, 22, 15]);
        assert_eq!(schoolbook_conv(&[7, 8, 9], &[1], 101), vec![7, 8, 9]);
        let a = [3, 1, 4, 1, 5];
        let b = [9, 2, 6];
        assert_eq!(schoolbook_conv(&a, &b, 97), schoolbook_conv(&b, &a, 97));
    }

    #[test]
    fn validate_hit_examples() {
        let t = Text::from("001001001");
        assert!(validate_hit(&t, HitKind::Cadence, CadenceHit { i: 3, d: 3 }));
        let u = Text::from("001010100");
        assert!(!validate_hit(&u, HitKind::Cadence, CadenceHit { i: 3, d: 2 }));
        assert!(validate_hit(&u, HitKind::SubCadence, CadenceHit { i: 3, d: 2 }));
        assert!(!validate_hit(&u, HitKind::SubCadence, CadenceHit { i: 3, d: 0 }));
        let aaa = Text::from("aaa");
        assert!(validate_hit(&aaa, HitKind::Cadence, CadenceHit { i: 1, d: 1 }));
    }

    #[test]
    fn bruteforce_counts() {
        let aaa = Text::from("aaa");
        assert_eq!(count_3subcadences_bruteforce(&aaa, b'a').unwrap(), 1);
        assert_eq!(count_3cadences_bruteforce(&aaa).unwrap(), 1);
        let t = Text::from("aaaaa");
        assert_eq!(count_3subcadences_bruteforce(&t, b'a').unwrap(), 4);
        let t = Text::from("001001001");
        let spec = PartialCadenceSpec::three_cadence();
        assert_eq!(count_partial_bruteforce_char(&t, b'1', &spec).unwrap(), 1);
        // '0' adds (1,3) and (2,3).
        assert_eq!(count_3cadences_bruteforce(&t).unwrap(), 3);
        assert_eq!(
            error_cadence_witness_bruteforce(&Text::from("001001001"), 3).unwrap(),
            Some(PartialCadenceSpec::three_cadence())
        );
        assert_eq!(error_cadence_witness_bruteforce(&Text::from("abcdefg"), 4).unwrap(), None);
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let cfg = RandomInstanceConfig {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(
            random_convex_polygon(&cfg).unwrap(),
            random_convex_polygon(&cfg).unwrap()
        );
        let mut g = InstanceGenerator::new(cfg).unwrap();
        let mut sizes = std::collections::BTreeSet::new();
        for _ in 0..2000 {
            let p = g.next_polygon();
            assert_eq!(p.validate(), Ok(()));
            assert!(p.len() <= 12);
            let bx = p.bounding_box();
            assert!(bx.x_lo >= 0 && bx.x_hi <= 400 && bx.y_lo >= 0 && bx.y_hi <= 400);
            sizes.insert(p.len());
        }
        assert!(sizes.contains(&3) && sizes.contains(&12), "{sizes:?}");
    }
}
