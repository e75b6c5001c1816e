//! Exact 2-D geometry over the rationals.
//!
//! Vertices are [`Rational`] points. Internally a polygon is also kept in
//! scaled integer form: every coordinate multiplied by the common denominator
//! `D` of all vertex coordinates, so that orientation tests and lattice
//! membership are plain `i128` arithmetic. Scaled coordinates and `D` are
//! bounded by `2^40`, which keeps every edge evaluation at a lattice point in
//! the bounding box below `2^123`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

use crate::error::{Error, Result};

/// Bound on scaled coordinates and on the common denominator.
const MAX_SCALED: i128 = 1 << 40;

pub(crate) fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// An exact fraction in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        Self::from_i128(num as i128, den as i128)
            .ok_or_else(|| Error::capacity(format!("rational {num}/{den} overflows")))
    }

    pub const fn integer(v: i64) -> Self {
        Rational { num: v, den: 1 }
    }

    fn from_i128(num: i128, den: i128) -> Option<Self> {
        debug_assert!(den != 0);
        let g = gcd_i128(num, den).max(1);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Some(Rational {
            num: i64::try_from(num).ok()?,
            den: i64::try_from(den).ok()?,
        })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn floor(self) -> i64 {
        floor_div(self.num as i128, self.den as i128) as i64
    }

    pub fn ceil(self) -> i64 {
        ceil_div(self.num as i128, self.den as i128) as i64
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        let (a, b) = (self.num as i128, self.den as i128);
        let (c, d) = (rhs.num as i128, rhs.den as i128);
        Self::from_i128(a * d + c * b, b * d)
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        self.checked_add(-rhs)
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        Self::from_i128(
            self.num as i128 * rhs.num as i128,
            self.den as i128 * rhs.den as i128,
        )
    }

    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.num == 0 {
            return None;
        }
        Self::from_i128(
            self.num as i128 * rhs.den as i128,
            self.den as i128 * rhs.num as i128,
        )
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

macro_rules! rational_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$checked(rhs).expect("rational arithmetic overflow")
            }
        }
    };
}

rational_op!(Add, add, checked_add);
rational_op!(Sub, sub, checked_sub);
rational_op!(Mul, mul, checked_mul);
rational_op!(Div, div, checked_div);

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// `"num/den"` or `"num"`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Ok(Rational::integer(parse(s)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RatPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RatPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RatPoint { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        RatPoint::new(Rational::integer(x), Rational::integer(y))
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Integer box `[x_lo, x_hi] x [y_lo, y_hi]`; empty when either range is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntBox {
    pub x_lo: i64,
    pub x_hi: i64,
    pub y_lo: i64,
    pub y_hi: i64,
}

impl IntBox {
    pub fn new(x_lo: i64, x_hi: i64, y_lo: i64, y_hi: i64) -> Self {
        IntBox {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.x_lo > self.x_hi || self.y_lo > self.y_hi
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        self.x_lo <= i && i <= self.x_hi && self.y_lo <= j && j <= self.y_hi
    }

    /// Number of lattice points.
    pub fn area(&self) -> u128 {
        if self.is_empty() {
            0
        } else {
            (self.x_hi - self.x_lo + 1) as u128 * (self.y_hi - self.y_lo + 1) as u128
        }
    }

    pub fn intersect(&self, other: &IntBox) -> IntBox {
        IntBox {
            x_lo: self.x_lo.max(other.x_lo),
            x_hi: self.x_hi.min(other.x_hi),
            y_lo: self.y_lo.max(other.y_lo),
            y_hi: self.y_hi.min(other.y_hi),
        }
    }

    /// Anti-diagonal range `x_lo + y_lo ..= x_hi + y_hi`.
    pub fn diagonal_range(&self) -> (i64, i64) {
        (self.x_lo + self.y_lo, self.x_hi + self.y_hi)
    }
}

/// First invariant a vertex list breaks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("too few vertices: {0} (need at least 3)")]
    TooFewVertices(usize),
    #[error("flag length: {edges} edge flags and {vertices} vertex flags for {expected} vertices")]
    FlagLength {
        expected: usize,
        edges: usize,
        vertices: usize,
    },
    #[error("duplicate vertex at index {0}")]
    DuplicateVertex(usize),
    #[error("collinear vertices around index {0}")]
    Collinear(usize),
    #[error("orientation: vertices are clockwise")]
    Orientation,
    #[error("not convex at vertex {0}")]
    NotConvex(usize),
    #[error("coordinates overflow the exact arithmetic range: {0}")]
    Overflow(String),
}

/// Common denominator and scaled integer coordinates of `points`.
pub(crate) fn scale_points(
    points: &[RatPoint],
) -> std::result::Result<(i128, Vec<(i128, i128)>), String> {
    let mut den: i128 = 1;
    for p in points {
        for c in [p.x, p.y] {
            let d = c.den() as i128;
            den = den / gcd_i128(den, d) * d;
            if den > MAX_SCALED {
                return Err(format!("common denominator exceeds 2^40 at {p}"));
            }
        }
    }
    let scale = |c: Rational| -> std::result::Result<i128, String> {
        let v = c.num() as i128 * (den / c.den() as i128);
        if v.abs() > MAX_SCALED {
            Err(format!("scaled coordinate of {c} exceeds 2^40"))
        } else {
            Ok(v)
        }
    };
    let scaled = points
        .iter()
        .map(|p| Ok((scale(p.x)?, scale(p.y)?)))
        .collect::<std::result::Result<Vec<_>, String>>()?;
    Ok((den, scaled))
}

#[inline]
pub(crate) fn cross(o: (i128, i128), a: (i128, i128), b: (i128, i128)) -> i128 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Checks that the vertex list is a strictly convex counter-clockwise polygon
/// with one flag per edge and per vertex.
pub fn validate(
    vertices: &[RatPoint],
    edge_included: &[bool],
    vertex_included: &[bool],
) -> std::result::Result<(), Violation> {
    let k = vertices.len();
    if k < 3 {
        return Err(Violation::TooFewVertices(k));
    }
    if edge_included.len() != k || vertex_included.len() != k {
        return Err(Violation::FlagLength {
            expected: k,
            edges: edge_included.len(),
            vertices: vertex_included.len(),
        });
    }
    for i in 0..k {
        if vertices[i + 1..].contains(&vertices[i]) {
            return Err(Violation::DuplicateVertex(i));
        }
    }
    let (_, pts) = scale_points(vertices).map_err(Violation::Overflow)?;
    check_strictly_convex(&pts)
}

fn check_strictly_convex(pts: &[(i128, i128)]) -> std::result::Result<(), Violation> {
    let k = pts.len();
    let turns: Vec<i128> = (0..k)
        .map(|i| cross(pts[i], pts[(i + 1) % k], pts[(i + 2) % k]))
        .collect();
    if let Some(i) = turns.iter().position(|&t| t == 0) {
        return Err(Violation::Collinear((i + 1) % k));
    }
    if turns.iter().all(|&t| t < 0) {
        return Err(Violation::Orientation);
    }
    if let Some(i) = turns.iter().position(|&t| t < 0) {
        return Err(Violation::NotConvex((i + 1) % k));
    }
    // All left turns; rule out polygons that wind more than once.
    for i in 1..k - 1 {
        if cross(pts[0], pts[i], pts[i + 1]) <= 0 {
            return Err(Violation::NotConvex(i));
        }
    }
    Ok(())
}

/// A strictly convex polygon, counter-clockwise, with inclusion flags for each
/// edge (edge `i` joins vertex `i` to vertex `i + 1`) and each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<RatPoint>,
    edge_included: Vec<bool>,
    vertex_included: Vec<bool>,
    scale: i128,
    scaled: Vec<(i128, i128)>,
    /// `(ea, eb, ec)` per edge: `ea*i + eb*j + ec` is positive strictly inside.
    edge_forms: Vec<[i128; 3]>,
    lattice_box: IntBox,
}

impl ConvexPolygon {
    /// Builds a polygon, reversing a clockwise vertex list (and permuting its
    /// flags) into counter-clockwise order.
    pub fn new(
        vertices: Vec<RatPoint>,
        edge_included: Vec<bool>,
        vertex_included: Vec<bool>,
    ) -> Result<Self> {
        match validate(&vertices, &edge_included, &vertex_included) {
            Ok(()) => {}
            Err(Violation::Orientation) => {
                let k = vertices.len();
                let vertices: Vec<_> = vertices.into_iter().rev().collect();
                let vertex_included: Vec<_> = vertex_included.into_iter().rev().collect();
                // Reversed edge j runs from old vertex k-1-j to old vertex k-2-j.
                let edge_included = (0..k).map(|j| edge_included[(2 * k - 2 - j) % k]).collect();
                return Self::new(vertices, edge_included, vertex_included);
            }
            Err(Violation::Overflow(msg)) => return Err(Error::Capacity(msg)),
            Err(v) => return Err(v.into()),
        }
        let (scale, scaled) = scale_points(&vertices).map_err(Error::Capacity)?;
        Ok(Self::from_parts(vertices, edge_included, vertex_included, scale, scaled))
    }

    /// All edges and vertices included (`true`) or excluded (`false`).
    pub fn with_boundary(vertices: Vec<RatPoint>, included: bool) -> Result<Self> {
        let k = vertices.len();
        Self::new(vertices, vec![included; k], vec![included; k])
    }

    fn from_parts(
        vertices: Vec<RatPoint>,
        edge_included: Vec<bool>,
        vertex_included: Vec<bool>,
        scale: i128,
        scaled: Vec<(i128, i128)>,
    ) -> Self {
        let k = scaled.len();
        let edge_forms = (0..k)
            .map(|e| {
                let (p, q) = (scaled[e], scaled[(e + 1) % k]);
                let (dx, dy) = (q.0 - p.0, q.1 - p.1);
                [-dy * scale, dx * scale, dy * p.0 - dx * p.1]
            })
            .collect();
        let lattice_box = rational_box(&vertices);
        ConvexPolygon {
            vertices,
            edge_included,
            vertex_included,
            scale,
            scaled,
            edge_forms,
            lattice_box,
        }
    }

    /// The same polygon with new flags.
    pub fn with_flags(&self, edge_included: Vec<bool>, vertex_included: Vec<bool>) -> Result<Self> {
        let k = self.len();
        if edge_included.len() != k || vertex_included.len() != k {
            return Err(Violation::FlagLength {
                expected: k,
                edges: edge_included.len(),
                vertices: vertex_included.len(),
            }
            .into());
        }
        Ok(ConvexPolygon {
            edge_included,
            vertex_included,
            ..self.clone()
        })
    }

    pub fn vertices(&self) -> &[RatPoint] {
        &self.vertices
    }

    pub fn edge_included(&self) -> &[bool] {
        &self.edge_included
    }

    pub fn vertex_included(&self) -> &[bool] {
        &self.vertex_included
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub(crate) fn scale(&self) -> i128 {
        self.scale
    }

    pub(crate) fn scaled_vertices(&self) -> &[(i128, i128)] {
        &self.scaled
    }

    /// Re-checks the structural invariants.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        validate(&self.vertices, &self.edge_included, &self.vertex_included)
    }

    /// Smallest integer box holding every lattice point of the closed polygon.
    pub fn bounding_box(&self) -> IntBox {
        self.lattice_box
    }

    /// Lattice membership under the inclusion flags.
    pub fn contains(&self, i: i64, j: i64) -> bool {
        if !self.lattice_box.contains(i, j) {
            return false;
        }
        let (i, j) = (i as i128, j as i128);
        let k = self.len();
        let mut on_edges = [usize::MAX; 2];
        let mut zeros = 0;
        for (e, f) in self.edge_forms.iter().enumerate() {
            let v = f[0] * i + f[1] * j + f[2];
            if v < 0 {
                return false;
            }
            if v == 0 {
                if zeros < 2 {
                    on_edges[zeros] = e;
                }
                zeros += 1;
            }
        }
        match zeros {
            0 => true,
            1 => self.edge_included[on_edges[0]],
            _ => {
                // On two adjacent edge lines: the vertex they share.
                let (e0, e1) = (on_edges[0], on_edges[1]);
                let v = if (e0 + 1) % k == e1 { e1 } else { e0 };
                self.vertex_included[v]
            }
        }
    }

    /// Strictly inside, ignoring every flag.
    pub fn contains_interior(&self, i: i64, j: i64) -> bool {
        let (i, j) = (i as i128, j as i128);
        self.lattice_box.contains(i as i64, j as i64)
            && self.edge_forms.iter().all(|f| f[0] * i + f[1] * j + f[2] > 0)
    }

    /// Translation by an integer vector; flags are carried along.
    pub fn translate(&self, dx: i64, dy: i64) -> Result<Self> {
        let vertices = self
            .vertices
            .iter()
            .map(|p| {
                Ok(RatPoint::new(
                    p.x.checked_add(dx.into()).ok_or_else(|| Error::capacity("translate"))?,
                    p.y.checked_add(dy.into()).ok_or_else(|| Error::capacity("translate"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, self.edge_included.clone(), self.vertex_included.clone())
    }

    /// Lattice points on the relative interior of edge `e`.
    pub fn edge_lattice_points(&self, e: usize) -> Vec<(i64, i64)> {
        let k = self.len();
        let mut out = Vec::new();
        lattice_on_scaled_segment(
            self.scaled[e],
            self.scaled[(e + 1) % k],
            self.scale,
            false,
            false,
            &mut out,
        );
        out
    }

    /// Vertex `v` as a lattice point, if it is one.
    pub fn vertex_lattice_point(&self, v: usize) -> Option<(i64, i64)> {
        let p = self.vertices[v];
        (p.x.is_integer() && p.y.is_integer()).then(|| (p.x.num(), p.y.num()))
    }
}

fn rational_box(vertices: &[RatPoint]) -> IntBox {
    let min_x = vertices.iter().map(|p| p.x).min().expect("nonempty");
    let max_x = vertices.iter().map(|p| p.x).max().expect("nonempty");
    let min_y = vertices.iter().map(|p| p.y).min().expect("nonempty");
    let max_y = vertices.iter().map(|p| p.y).max().expect("nonempty");
    IntBox::new(min_x.ceil(), max_x.floor(), min_y.ceil(), max_y.floor())
}

pub fn bounding_box(poly: &ConvexPolygon) -> IntBox {
    poly.bounding_box()
}

pub fn contains(poly: &ConvexPolygon, point: (i64, i64)) -> bool {
    poly.contains(point.0, point.1)
}

/// Lattice points of the closed segment `p1 p2`, ordered from `p1`, with the
/// endpoints filtered by their flags.
pub fn lattice_points_on_segment(
    p1: RatPoint,
    p2: RatPoint,
    include_p1: bool,
    include_p2: bool,
) -> Result<Vec<(i64, i64)>> {
    if p1 == p2 {
        return Err(Error::invalid("segment endpoints coincide"));
    }
    let (d, pts) = scale_points(&[p1, p2]).map_err(Error::Capacity)?;
    let mut out = Vec::new();
    lattice_on_scaled_segment(pts[0], pts[1], d, include_p1, include_p2, &mut out);
    Ok(out)
}

/// Lattice points `(i, j)` with `(i d, j d)` on the scaled segment `p q`,
/// appended in order from `p`. Walks the longer axis, so the cost is linear in
/// the segment length.
pub(crate) fn lattice_on_scaled_segment(
    p: (i128, i128),
    q: (i128, i128),
    d: i128,
    include_p: bool,
    include_q: bool,
    out: &mut Vec<(i64, i64)>,
) {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    if dx == 0 && dy == 0 {
        if (include_p || include_q) && p.0 % d == 0 && p.1 % d == 0 {
            out.push(((p.0 / d) as i64, (p.1 / d) as i64));
        }
        return;
    }
    // Walk along axis `a` (the longer one); `b` is solved from the line.
    let x_major = dx.abs() >= dy.abs();
    let (pa, pb, qa, da, db) = if x_major {
        (p.0, p.1, q.0, dx, dy)
    } else {
        (p.1, p.0, q.1, dy, dx)
    };
    let lo = ceil_div(pa.min(qa), d);
    let hi = floor_div(pa.max(qa), d);
    if lo > hi {
        return;
    }
    let mut emit = |ta: i128| {
        let num = db * (ta * d - pa);
        if num % da != 0 {
            return;
        }
        let w = num / da + pb;
        if w % d != 0 {
            return;
        }
        let tb = w / d;
        let (i, j) = if x_major { (ta, tb) } else { (tb, ta) };
        let scaled = (i * d, j * d);
        if (scaled == p && !include_p) || (scaled == q && !include_q) {
            return;
        }
        out.push((i as i64, j as i64));
    };
    if da > 0 {
        (lo..=hi).for_each(&mut emit);
    } else {
        (lo..=hi).rev().for_each(&mut emit);
    }
}

/// Strict convex hull (no collinear vertices) in counter-clockwise order.
pub fn convex_hull(points: &[RatPoint]) -> Result<Vec<RatPoint>> {
    let (_, scaled) = scale_points(points).map_err(Error::Capacity)?;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by_key(|&i| scaled[i]);
    idx.dedup_by_key(|i| scaled[*i]);
    if idx.len() < 3 {
        return Ok(idx.into_iter().map(|i| points[i]).collect());
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(
                    scaled[hull[hull.len() - 2]],
                    scaled[hull[hull.len() - 1]],
                    scaled[i],
                ) <= 0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    Ok(hull.into_iter().map(|i| points[i]).collect())
}

fn parse_flags(line: &str, k: usize, lineno: usize, what: &str) -> Result<Vec<bool>> {
    let flags: Vec<bool> = line
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '1' => Ok(true),
            '0' => Ok(false),
            other => Err(Error::Parse(format!(
                "line {lineno}: {what} flag {other:?} is not '0' or '1'"
            ))),
        })
        .collect::<Result<_>>()?;
    if flags.len() != k {
        return Err(Error::Parse(format!(
            "line {lineno}: expected {k} {what} flags, found {}",
            flags.len()
        )));
    }
    Ok(flags)
}

/// Parses the polygon text format: vertex count `k`, then `k` lines of
/// `x y` rationals (`num/den` or `num`), then a line of `k` edge flags and a
/// line of `k` vertex flags, each flag `0` or `1`.
pub fn parse_polygon(text: &str) -> Result<ConvexPolygon> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("unexpected end of input, expected {what}")))
    };
    let (lineno, line) = next("vertex count")?;
    let k: usize = line
        .parse()
        .map_err(|e| Error::Parse(format!("line {lineno}: bad vertex count {line:?}: {e}")))?;
    let mut vertices = Vec::with_capacity(k);
    for _ in 0..k {
        let (lineno, line) = next("vertex")?;
        let coords: Vec<&str> = line.split_whitespace().collect();
        if coords.len() != 2 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected two coordinates, found {line:?}"
            )));
        }
        let at_line = |e: Error| Error::Parse(format!("line {lineno}: {e}"));
        let x: Rational = coords[0].parse().map_err(at_line)?;
        let y: Rational = coords[1].parse().map_err(at_line)?;
        vertices.push(RatPoint::new(x, y));
    }
    let (lineno, line) = next("edge flags")?;
    let edges = parse_flags(line, k, lineno, "edge")?;
    let (lineno, line) = next("vertex flags")?;
    let verts = parse_flags(line, k, lineno, "vertex")?;
    ConvexPolygon::new(vertices, edges, verts)
}

/// Inverse of [`parse_polygon`].
pub fn format_polygon(poly: &ConvexPolygon) -> String {
    let mut s = format!("{}\n", poly.len());
    for v in poly.vertices() {
        s.push_str(&format!("{} {}\n", v.x, v.y));
    }
    let flags = |f: &[bool]| f.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
    s.push_str(&flags(poly.edge_included()));
    s.push('\n');
    s.push_str(&flags(poly.vertex_included()));
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn pt(x: i64, y: i64) -> RatPoint {
        RatPoint::int(x, y)
    }

    fn square(side: i64, included: bool) -> ConvexPolygon {
        ConvexPolygon::with_boundary(
            vec![pt(0, 0), pt(side, 0), pt(side, side), pt(0, side)],
            included,
        )
        .unwrap()
    }

    #[test]
    fn rational_basics() {
        assert_eq!(r(6, -4), r(-3, 2));
        assert_eq!(r(-3, 2).floor(), -2);
        assert_eq!(r(-3, 2).ceil(), -1);
        assert_eq!(r(7, 1).floor(), 7);
        assert_eq!(r(1, 3) + r(1, 6), r(1, 2));
        assert_eq!(r(1, 3) * r(3, 4), r(1, 4));
        assert!(r(1, 3) < r(1, 2));
        assert_eq!("24/5".parse::<Rational>().unwrap(), r(24, 5));
        assert_eq!("-7".parse::<Rational>().unwrap(), Rational::integer(-7));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!(Rational::integer(i64::MAX)
            .checked_add(Rational::integer(1))
            .is_none());
    }

    #[test]
    fn validate_examples() {
        let sq = [pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)];
        let flags = [true; 4];
        assert_eq!(validate(&sq, &flags, &flags), Ok(()));
        let cw: Vec<_> = sq.iter().rev().copied().collect();
        let err = validate(&cw, &flags, &flags).unwrap_err();
        assert_eq!(err, Violation::Orientation);
        assert!(err.to_string().contains("orientation"));
        let line = [pt(0, 0), pt(1, 1), pt(2, 2)];
        let err = validate(&line, &[true; 3], &[true; 3]).unwrap_err();
        assert!(matches!(err, Violation::Collinear(_)));
        assert!(err.to_string().contains("collinear"));
        assert!(matches!(
            validate(&sq[..2], &[true; 2], &[true; 2]),
            Err(Violation::TooFewVertices(2))
        ));
        assert!(matches!(
            validate(&sq, &[true; 3], &flags),
            Err(Violation::FlagLength { .. })
        ));
        let dup = [pt(0, 0), pt(1, 0), pt(0, 0), pt(0, 1)];
        assert!(matches!(
            validate(&dup, &flags, &flags),
            Err(Violation::DuplicateVertex(0))
        ));
        let dart = [pt(0, 0), pt(4, 0), pt(1, 1), pt(0, 4)];
        assert!(matches!(
            validate(&dart, &flags, &flags),
            Err(Violation::NotConvex(_))
        ));
        // Pentagram order: every turn is a left turn but it winds twice.
        let star = [pt(10, 0), pt(-8, 6), pt(3, -10), pt(3, 10), pt(-8, -6)];
        let f5 = [true; 5];
        assert!(validate(&star, &f5, &f5).is_err());
    }

    #[test]
    fn construction_normalizes_clockwise_input() {
        // Clockwise square with only the edge (0,1)->(1,1) and vertex (1,1) included.
        let cw = vec![pt(0, 0), pt(0, 1), pt(1, 1), pt(1, 0)];
        let poly = ConvexPolygon::new(
            cw,
            vec![false, true, false, false],
            vec![false, false, true, false],
        )
        .unwrap();
        assert_eq!(poly.validate(), Ok(()));
        let top = poly
            .vertices()
            .iter()
            .position(|&v| v == pt(1, 1))
            .unwrap();
        assert!(poly.vertex_included()[top]);
        assert_eq!(poly.vertex_included().iter().filter(|&&b| b).count(), 1);
        let k = poly.len();
        let e = (0..k)
            .find(|&e| {
                let (a, b) = (poly.vertices()[e], poly.vertices()[(e + 1) % k]);
                (a == pt(1, 1) && b == pt(0, 1)) || (a == pt(0, 1) && b == pt(1, 1))
            })
            .unwrap();
        assert!(poly.edge_included()[e]);
        assert_eq!(poly.edge_included().iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn bounding_box_examples() {
        let tri = ConvexPolygon::with_boundary(vec![pt(0, 0), pt(2, 0), pt(0, 2)], true).unwrap();
        assert_eq!(tri.bounding_box(), IntBox::new(0, 2, 0, 2));

        let quad = ConvexPolygon::with_boundary(
            vec![
                RatPoint::int(3, 6),
                RatPoint::new(r(24, 5), r(36, 5)),
                RatPoint::int(6, 9),
                RatPoint::int(4, 8),
            ],
            false,
        )
        .unwrap();
        assert_eq!(quad.bounding_box(), IntBox::new(3, 6, 6, 9));

        let thin = ConvexPolygon::with_boundary(
            vec![
                RatPoint::new(r(1, 4), r(0, 1)),
                RatPoint::new(r(3, 4), r(0, 1)),
                RatPoint::new(r(1, 2), r(5, 1)),
            ],
            true,
        )
        .unwrap();
        assert!(thin.bounding_box().is_empty());
        assert!(!(0..=6).any(|j| (-1..=2).any(|i| thin.contains(i, j))));
    }

    #[test]
    fn contains_examples() {
        let closed = square(2, true);
        assert!(closed.contains(1, 1));
        assert!(closed.contains(0, 1));
        assert!(closed.contains(2, 2));
        assert!(!closed.contains(3, 1));
        let open_edges = closed.with_flags(vec![false; 4], vec![true; 4]).unwrap();
        assert!(!open_edges.contains(0, 1));
        assert!(open_edges.contains(0, 0));
        assert!(open_edges.contains(1, 1));
    }

    #[test]
    fn contains_partial_cadence_corner_flags() {
        // A=(3,6) B=(24/5,36/5) C=(6,9) D=(4,8); only C, BC and CD included.
        let quad = ConvexPolygon::new(
            vec![
                RatPoint::int(3, 6),
                RatPoint::new(r(24, 5), r(36, 5)),
                RatPoint::int(6, 9),
                RatPoint::int(4, 8),
            ],
            vec![false, true, true, false],
            vec![false, false, true, false],
        )
        .unwrap();
        assert!(quad.contains(6, 9));
        assert!(!quad.contains(3, 6));
        assert!(!quad.contains(4, 8));
        // (5,8) lies on CD? C=(6,9), D=(4,8): midpoint is (5, 17/2); (5,8) is interior.
        assert!(quad.contains(5, 8));
    }

    #[test]
    fn segment_examples() {
        assert_eq!(
            lattice_points_on_segment(pt(0, 0), pt(4, 2), true, true).unwrap(),
            vec![(0, 0), (2, 1), (4, 2)]
        );
        assert_eq!(
            lattice_points_on_segment(pt(0, 0), RatPoint::new(r(1, 1), r(3, 2)), true, true)
                .unwrap(),
            vec![(0, 0)]
        );
        assert_eq!(
            lattice_points_on_segment(pt(0, 0), pt(3, 3), false, false).unwrap(),
            vec![(1, 1), (2, 2)]
        );
        assert_eq!(
            lattice_points_on_segment(pt(2, 5), pt(2, 1), true, false).unwrap(),
            vec![(2, 5), (2, 4), (2, 3), (2, 2)]
        );
        assert!(lattice_points_on_segment(pt(1, 1), pt(1, 1), true, true).is_err());
    }

    #[test]
    fn segment_matches_box_scan() {
        let coords = [
            (r(-3, 2), r(7, 3)),
            (r(5, 1), r(-2, 1)),
            (r(9, 4), r(9, 4)),
            (r(0, 1), r(6, 1)),
            (r(-7, 1), r(-1, 1)),
        ];
        for &(x1, y1) in &coords {
            for &(x2, y2) in &coords {
                let (p, q) = (RatPoint::new(x1, y1), RatPoint::new(x2, y2));
                if p == q {
                    continue;
                }
                let got = lattice_points_on_segment(p, q, true, true).unwrap();
                let mut expected = Vec::new();
                for i in x1.min(x2).ceil()..=x1.max(x2).floor() {
                    for j in y1.min(y2).ceil()..=y1.max(y2).floor() {
                        let (ri, rj) = (Rational::integer(i), Rational::integer(j));
                        // collinear with p, q
                        if (x2 - x1) * (rj - y1) == (y2 - y1) * (ri - x1) {
                            expected.push((i, j));
                        }
                    }
                }
                let mut sorted = got.clone();
                sorted.sort();
                assert_eq!(sorted, expected, "{p} -> {q}");
            }
        }
    }

    #[test]
    fn hull_drops_collinear_points() {
        let pts = vec![pt(0, 0), pt(2, 0), pt(4, 0), pt(4, 4), pt(0, 4), pt(2, 2), pt(0, 2)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull, vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)]);
        assert_eq!(convex_hull(&[pt(0, 0), pt(1, 1), pt(2, 2)]).unwrap().len(), 2);
    }

    #[test]
    fn polygon_text_round_trip() {
        let text = "4\n3 6\n24/5 36/5\n6 9\n4 8\n0110\n0010\n";
        let poly = parse_polygon(text).unwrap();
        assert_eq!(format_polygon(&poly), text);
        let err = parse_polygon("3\n0 0\n1 0\n0 1\n11x\n111\n").unwrap_err();
        assert!(err.to_string().contains("line 5"), "{err}");
        let err = parse_polygon("3\n0 0\n1 0\n").unwrap_err();
        assert!(err.to_string().contains("vertex"), "{err}");
        let err = parse_polygon("3\n0 0\n1 a\n0 1\n111\n111\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn capacity_is_reported() {
        let huge = RatPoint::int(1 << 50, 0);
        let err = ConvexPolygon::with_boundary(vec![pt(0, 0), huge, pt(0, 1)], true).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }
}
