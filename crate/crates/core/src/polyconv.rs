//! Diagonal sums over convex lattice regions.
//!
//! For sequences `a`, `b` (indexed by absolute integer coordinates, zero
//! outside `[0, len)`) and a convex polygon `P`, computes
//! `c_k = sum a_i * b_j` over the lattice points `(i, j)` of `P` with
//! `i + j = k`, modulo the plan's prime.
//!
//! Rectangles are one acyclic convolution. Axis-parallel right triangles are
//! split at the midpoints of their catheti into a rectangle and two smaller
//! right triangles. A general triangle is a signed combination of at most
//! four rectangles and right triangles, and a convex polygon is cut into ear
//! triangles around the sub-polygon on every other vertex.

use crate::error::{Error, Result};
use crate::geometry::{
    ceil_div, cross, floor_div, gcd_i128, lattice_on_scaled_segment, ConvexPolygon, IntBox,
    RatPoint,
};
use crate::ntt::{add_mod, mul_mod, sub_mod, NttPlan};

pub use crate::oracle::conv_polygon_bruteforce;

/// `values[t]` holds `c_{k_min + t}` modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSums {
    pub k_min: i64,
    pub values: Vec<u64>,
    pub modulus: u64,
}

impl DiagonalSums {
    pub fn zeros(k_min: i64, len: usize, modulus: u64) -> Self {
        DiagonalSums {
            k_min,
            values: vec![0; len],
            modulus,
        }
    }

    /// Zero sums covering the diagonals of `bx`.
    pub fn for_box(bx: &IntBox, modulus: u64) -> Self {
        let (lo, hi) = bx.diagonal_range();
        let len = if bx.is_empty() { 0 } else { (hi - lo + 1) as usize };
        Self::zeros(lo, len, modulus)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last diagonal index; `k_min - 1` when empty.
    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    /// `c_k`, zero outside the stored range.
    pub fn get(&self, k: i64) -> u64 {
        let t = k - self.k_min;
        if t < 0 {
            return 0;
        }
        self.values.get(t as usize).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(t, &v)| (self.k_min + t as i64, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn slot(&mut self, k: i64) -> &mut u64 {
        let t = k - self.k_min;
        debug_assert!(
            0 <= t && (t as usize) < self.values.len(),
            "diagonal {k} outside [{}, {}]",
            self.k_min,
            self.k_max()
        );
        &mut self.values[t as usize]
    }

    pub(crate) fn add_at(&mut self, k: i64, v: u64) {
        let p = self.modulus;
        let s = self.slot(k);
        *s = add_mod(*s, v, p);
    }

    pub(crate) fn add_signed(&mut self, k: i64, v: u64, sign: i64) {
        let p = self.modulus;
        let s = self.slot(k);
        let m = mul_mod(v, sign.rem_euclid(p as i64) as u64, p);
        *s = add_mod(*s, m, p);
    }

    /// Entrywise sum over the union of both ranges.
    pub fn combine(&self, other: &DiagonalSums, sign: i64) -> DiagonalSums {
        assert_eq!(self.modulus, other.modulus, "moduli differ");
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return DiagonalSums::zeros(other.k_min, other.len(), other.modulus)
                .combine(other, sign);
        }
        let lo = self.k_min.min(other.k_min);
        let hi = self.k_max().max(other.k_max());
        let mut out = DiagonalSums::zeros(lo, (hi - lo + 1) as usize, self.modulus);
        for (k, v) in self.iter() {
            out.add_at(k, v);
        }
        for (k, v) in other.iter() {
            out.add_signed(k, v, sign);
        }
        out
    }
}

/// Inclusion flags of a polygon's boundary, edge `i` from vertex `i` to `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryFlags {
    pub edges: Vec<bool>,
    pub vertices: Vec<bool>,
}

impl BoundaryFlags {
    pub fn of(poly: &ConvexPolygon) -> Self {
        BoundaryFlags {
            edges: poly.edge_included().to_vec(),
            vertices: poly.vertex_included().to_vec(),
        }
    }

    pub fn uniform(k: usize, included: bool) -> Self {
        BoundaryFlags {
            edges: vec![included; k],
            vertices: vec![included; k],
        }
    }
}

#[inline]
fn value_at(s: &[u64], i: i64) -> u64 {
    if i >= 0 && (i as usize) < s.len() {
        s[i as usize]
    } else {
        0
    }
}

struct Ctx<'a> {
    a: &'a [u64],
    b: &'a [u64],
    plan: &'a NttPlan,
}

impl<'a> Ctx<'a> {
    fn new(a: &'a [u64], b: &'a [u64], plan: &'a NttPlan) -> Result<Self> {
        plan.check_capacity(a.len())?;
        plan.check_capacity(b.len())?;
        plan.check_reduced(a)?;
        plan.check_reduced(b)?;
        Ok(Ctx { a, b, plan })
    }

    fn p(&self) -> u64 {
        self.plan.modulus()
    }

    fn product(&self, i: i64, j: i64) -> u64 {
        mul_mod(value_at(self.a, i), value_at(self.b, j), self.p())
    }

    fn support(&self) -> IntBox {
        IntBox::new(0, self.a.len() as i64 - 1, 0, self.b.len() as i64 - 1)
    }

    fn rect_into(&self, acc: &mut DiagonalSums, bx: &IntBox, sign: i64) {
        let bx = bx.intersect(&self.support());
        if bx.is_empty() {
            return;
        }
        let wa = &self.a[bx.x_lo as usize..=bx.x_hi as usize];
        let wb = &self.b[bx.y_lo as usize..=bx.y_hi as usize];
        let k0 = bx.x_lo + bx.y_lo;
        for (t, v) in self.plan.convolve(wa, wb).into_iter().enumerate() {
            if v != 0 {
                acc.add_signed(k0 + t as i64, v, sign);
            }
        }
    }

    /// Support of the sequences in the canonical frame of `t`.
    fn canonical_support(&self, t: &RightTriangle) -> (i128, i128, i128, i128) {
        let range = |len: usize, s: i128| {
            let hi = len as i128 - 1;
            if s > 0 {
                (0, hi)
            } else {
                (-hi, 0)
            }
        };
        let (ulo, uhi) = range(self.a.len(), t.sx);
        let (vlo, vhi) = range(self.b.len(), t.sy);
        (ulo, uhi, vlo, vhi)
    }

    fn right_triangle_into(&self, acc: &mut DiagonalSums, t: RightTriangle, sign: i64) {
        if self.a.is_empty() || self.b.is_empty() {
            return;
        }
        let (ulo, uhi, vlo, vhi) = self.canonical_support(&t);
        self.right_triangle_rec(acc, t, sign, (ulo, uhi, vlo, vhi));
    }

    fn right_triangle_rec(
        &self,
        acc: &mut DiagonalSums,
        mut t: RightTriangle,
        sign: i64,
        (ulo, uhi, vlo, vhi): (i128, i128, i128, i128),
    ) {
        // Raising the corner to the support keeps the region a right triangle.
        t.u0 = t.u0.max(ulo);
        t.v0 = t.v0.max(vlo);
        if t.u0 > uhi || t.v0 > vhi || t.alpha * t.u0 + t.beta * t.v0 >= t.gamma {
            return;
        }
        let umax = t.u_max(t.v0);
        let vmax = t.v_max(t.u0);
        if umax - t.u0 <= 1 {
            for u in t.u0..=umax.min(uhi) {
                for v in t.v0..=t.v_max(u).min(vhi) {
                    self.add_canonical(acc, &t, u, v, sign);
                }
            }
            return;
        }
        if vmax - t.v0 <= 1 {
            for v in t.v0..=vmax.min(vhi) {
                for u in t.u0..=t.u_max(v).min(uhi) {
                    self.add_canonical(acc, &t, u, v, sign);
                }
            }
            return;
        }
        // Ceilings of the midpoints between the corner and the real intercepts.
        let um = ceil_div(t.alpha * t.u0 + t.gamma - t.beta * t.v0, 2 * t.alpha);
        let vm = ceil_div(t.beta * t.v0 + t.gamma - t.alpha * t.u0, 2 * t.beta);
        let (i1, i2) = (t.sx * t.u0, t.sx * (um - 1));
        let (j1, j2) = (t.sy * t.v0, t.sy * (vm - 1));
        let rect = IntBox::new(
            i1.min(i2) as i64,
            i1.max(i2) as i64,
            j1.min(j2) as i64,
            j1.max(j2) as i64,
        );
        self.rect_into(acc, &rect, sign);
        let bounds = (ulo, uhi, vlo, vhi);
        self.right_triangle_rec(acc, RightTriangle { u0: um, ..t }, sign, bounds);
        self.right_triangle_rec(acc, RightTriangle { v0: vm, ..t }, sign, bounds);
    }

    fn add_canonical(&self, acc: &mut DiagonalSums, t: &RightTriangle, u: i128, v: i128, sign: i64) {
        let (i, j) = ((t.sx * u) as i64, (t.sy * v) as i64);
        let w = self.product(i, j);
        if w != 0 {
            acc.add_signed(i + j, w, sign);
        }
    }

    fn piece_into(&self, acc: &mut DiagonalSums, piece: &SignedPiece) {
        let sign = piece.sign as i64;
        match &piece.shape {
            PieceShape::Rect(bx) => self.rect_into(acc, bx, sign),
            PieceShape::RightTriangle(t) => self.right_triangle_into(acc, *t, sign),
        }
    }

    /// Exact sums of `tri` under its own flags, added into `acc`.
    fn triangle_into(&self, acc: &mut DiagonalSums, tri: &ConvexPolygon) -> Result<()> {
        let pieces = decompose_triangle(tri)?;
        for piece in &pieces {
            self.piece_into(acc, piece);
        }
        // Away from every boundary the signed pieces agree with the triangle;
        // settle the lattice points on boundaries one by one.
        let d = tri.scale();
        let mut points = Vec::new();
        let outline = tri.scaled_vertices();
        push_outline(outline, d, &mut points);
        for piece in &pieces {
            push_outline(&piece.outline, d, &mut points);
        }
        points.sort_unstable();
        points.dedup();
        for (i, j) in points {
            let want = tri.contains(i, j) as i64;
            let got: i64 = pieces
                .iter()
                .filter(|pc| pc.contains(i, j))
                .map(|pc| pc.sign as i64)
                .sum();
            if want != got {
                acc.add_signed(i + j, self.product(i, j), want - got);
            }
        }
        Ok(())
    }

    /// Sums of the polygon with every edge and vertex excluded.
    fn open_polygon_into(&self, acc: &mut DiagonalSums, poly: &ConvexPolygon) -> Result<()> {
        let v = poly.vertices();
        let k = v.len();
        let tri = |p: [RatPoint; 3], edges: [bool; 3]| {
            ConvexPolygon::new(p.to_vec(), edges.to_vec(), vec![false; 3])
        };
        match k {
            3 => self.triangle_into(acc, &tri([v[0], v[1], v[2]], [false; 3])?),
            4 => {
                // The diagonal V1 V3 belongs to the first triangle only.
                self.triangle_into(acc, &tri([v[0], v[1], v[3]], [false, true, false])?)?;
                self.triangle_into(acc, &tri([v[1], v[2], v[3]], [false; 3])?)
            }
            _ => {
                let mut inner = Vec::with_capacity(k / 2 + 1);
                let mut i = 0;
                while i + 1 < k {
                    let ear = [v[i], v[i + 1], v[(i + 2) % k]];
                    self.triangle_into(acc, &tri(ear, [false, false, true])?)?;
                    inner.push(v[i]);
                    i += 2;
                }
                if k % 2 == 1 {
                    inner.push(v[k - 1]);
                }
                let inner = ConvexPolygon::with_boundary(inner, false)?;
                self.open_polygon_into(acc, &inner)
            }
        }
    }
}

fn push_outline(outline: &[(i128, i128)], d: i128, out: &mut Vec<(i64, i64)>) {
    let k = outline.len();
    for e in 0..k {
        lattice_on_scaled_segment(outline[e], outline[(e + 1) % k], d, true, true, out);
    }
}

/// An axis-parallel right triangle in its canonical frame `u = sx*i`,
/// `v = sy*j`: the lattice points with `u >= u0`, `v >= v0` and
/// `alpha*u + beta*v < gamma` (`alpha, beta > 0`). The catheti and the corner
/// are closed; the hypotenuse and its endpoints are open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RightTriangle {
    sx: i128,
    sy: i128,
    u0: i128,
    v0: i128,
    alpha: i128,
    beta: i128,
    gamma: i128,
}

impl RightTriangle {
    /// From scaled corner `c` and the hypotenuse endpoints `p`, `q`, one of
    /// which shares `c`'s y and the other `c`'s x. `None` if degenerate.
    fn from_scaled(
        c: (i128, i128),
        p: (i128, i128),
        q: (i128, i128),
        d: i128,
    ) -> Option<RightTriangle> {
        let (hx, hy) = if p.1 == c.1 && q.0 == c.0 {
            (p, q)
        } else if q.1 == c.1 && p.0 == c.0 {
            (q, p)
        } else {
            return None;
        };
        let sx = (hx.0 - c.0).signum();
        let sy = (hy.1 - c.1).signum();
        if sx == 0 || sy == 0 {
            return None;
        }
        let mut a = hy.1 - hx.1;
        let mut b = hx.0 - hy.0;
        let mut c0 = a * hx.0 + b * hx.1;
        if a * c.0 + b * c.1 - c0 > 0 {
            (a, b, c0) = (-a, -b, -c0);
        }
        let (alpha, beta, gamma) = (a * d * sx, b * d * sy, c0);
        debug_assert!(alpha > 0 && beta > 0);
        let g = gcd_i128(gcd_i128(alpha, beta), gamma).max(1);
        Some(RightTriangle {
            sx,
            sy,
            u0: ceil_div(sx * c.0, d),
            v0: ceil_div(sy * c.1, d),
            alpha: alpha / g,
            beta: beta / g,
            gamma: gamma / g,
        })
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        let (u, v) = (self.sx * i as i128, self.sy * j as i128);
        u >= self.u0 && v >= self.v0 && self.alpha * u + self.beta * v < self.gamma
    }

    /// Largest `u` in the triangle on row `v`.
    fn u_max(&self, v: i128) -> i128 {
        ceil_div(self.gamma - self.beta * v, self.alpha) - 1
    }

    fn v_max(&self, u: i128) -> i128 {
        ceil_div(self.gamma - self.alpha * u, self.beta) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PieceShape {
    /// Closed lattice box.
    Rect(IntBox),
    RightTriangle(RightTriangle),
}

/// One signed term of a triangle decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPiece {
    sign: i8,
    shape: PieceShape,
    /// Real outline in the parent's scaled coordinates.
    outline: Vec<(i128, i128)>,
}

impl SignedPiece {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_rectangle(&self) -> bool {
        matches!(self.shape, PieceShape::Rect(_))
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        match &self.shape {
            PieceShape::Rect(bx) => bx.contains(i, j),
            PieceShape::RightTriangle(t) => t.contains(i, j),
        }
    }
}

/// Mirror and swap taking a chosen vertex to the lower-left corner.
#[derive(Clone, Copy)]
struct Frame {
    mx: i128,
    my: i128,
    swap: bool,
}

impl Frame {
    fn to(&self, p: (i128, i128)) -> (i128, i128) {
        let q = (self.mx * p.0, self.my * p.1);
        if self.swap {
            (q.1, q.0)
        } else {
            q
        }
    }

    fn from(&self, p: (i128, i128)) -> (i128, i128) {
        let q = if self.swap { (p.1, p.0) } else { p };
        (self.mx * q.0, self.my * q.1)
    }
}

enum Draft {
    Rect((i128, i128), (i128, i128)),
    Tri((i128, i128), (i128, i128), (i128, i128)),
}

fn right_corner(pts: &[(i128, i128)]) -> Option<usize> {
    (0..3).find(|&c| {
        let (p, q) = (pts[(c + 1) % 3], pts[(c + 2) % 3]);
        let c = pts[c];
        (p.1 == c.1 && q.0 == c.0) || (p.0 == c.0 && q.1 == c.1)
    })
}

/// Signed rectangles and right triangles whose indicator sum equals the
/// triangle's away from all of their boundaries.
pub fn decompose_triangle(tri: &ConvexPolygon) -> Result<Vec<SignedPiece>> {
    if tri.len() != 3 {
        return Err(Error::Shape(format!(
            "expected a triangle, got {} vertices",
            tri.len()
        )));
    }
    let d = tri.scale();
    let pts = tri.scaled_vertices();
    if let Some(c) = right_corner(pts) {
        let (p, q) = (pts[(c + 1) % 3], pts[(c + 2) % 3]);
        let t = RightTriangle::from_scaled(pts[c], p, q, d).expect("nondegenerate");
        return Ok(vec![SignedPiece {
            sign: 1,
            shape: PieceShape::RightTriangle(t),
            outline: vec![pts[c], p, q],
        }]);
    }
    let xl = pts.iter().map(|p| p.0).min().unwrap();
    let xu = pts.iter().map(|p| p.0).max().unwrap();
    let yl = pts.iter().map(|p| p.1).min().unwrap();
    let yu = pts.iter().map(|p| p.1).max().unwrap();
    let corner = (0..3)
        .find(|&i| (pts[i].0 == xl || pts[i].0 == xu) && (pts[i].1 == yl || pts[i].1 == yu))
        .expect("a triangle has a vertex at a corner of its bounding box");
    let mut frame = Frame {
        mx: if pts[corner].0 == xu { -1 } else { 1 },
        my: if pts[corner].1 == yu { -1 } else { 1 },
        swap: false,
    };
    let others = [(corner + 1) % 3, (corner + 2) % 3];
    let mut drafts = Vec::with_capacity(4);
    let top = |f: &Frame| {
        let t: Vec<_> = pts.iter().map(|&p| f.to(p)).collect();
        let hi = (
            t.iter().map(|p| p.0).max().unwrap(),
            t.iter().map(|p| p.1).max().unwrap(),
        );
        (t, hi)
    };
    let (t, (tx, ty)) = top(&frame);
    let a = t[corner];
    if let Some(&ci) = others.iter().find(|&&i| t[i] == (tx, ty)) {
        let vi = others[0] + others[1] - ci;
        if cross(a, t[ci], t[vi]) > 0 {
            frame.swap = true;
        }
        let (t, (tx, _)) = top(&frame);
        let (a, c, v) = (t[corner], t[ci], t[vi]);
        // The third vertex lies below the diagonal: the lower-right half-box
        // minus what is under the path a -> v -> c.
        drafts.push((1, Draft::Tri((tx, a.1), a, c)));
        drafts.push((-1, Draft::Tri((v.0, a.1), a, v)));
        drafts.push((-1, Draft::Rect((v.0, a.1), (tx, v.1))));
        drafts.push((-1, Draft::Tri((tx, v.1), v, c)));
    } else {
        let pi = *others.iter().find(|&&i| t[i].0 == tx).expect("right side");
        let qi = others[0] + others[1] - pi;
        let (p, q) = (t[pi], t[qi]);
        debug_assert_eq!(q.1, ty);
        drafts.push((1, Draft::Rect(a, (tx, ty))));
        drafts.push((-1, Draft::Tri((a.0, ty), q, a)));
        drafts.push((-1, Draft::Tri((tx, ty), q, p)));
        drafts.push((-1, Draft::Tri((tx, a.1), a, p)));
    }
    let mut pieces = Vec::with_capacity(drafts.len());
    for (sign, draft) in drafts {
        match draft {
            Draft::Rect(lo, hi) => {
                let (lo, hi) = (frame.from(lo), frame.from(hi));
                let (x1, x2) = (lo.0.min(hi.0), lo.0.max(hi.0));
                let (y1, y2) = (lo.1.min(hi.1), lo.1.max(hi.1));
                if x1 == x2 || y1 == y2 {
                    continue;
                }
                let bx = IntBox::new(
                    ceil_div(x1, d) as i64,
                    floor_div(x2, d) as i64,
                    ceil_div(y1, d) as i64,
                    floor_div(y2, d) as i64,
                );
                pieces.push(SignedPiece {
                    sign,
                    shape: PieceShape::Rect(bx),
                    outline: vec![(x1, y1), (x2, y1), (x2, y2), (x1, y2)],
                });
            }
            Draft::Tri(c, p, q) => {
                let (c, p, q) = (frame.from(c), frame.from(p), frame.from(q));
                if let Some(rt) = RightTriangle::from_scaled(c, p, q, d) {
                    pieces.push(SignedPiece {
                        sign,
                        shape: PieceShape::RightTriangle(rt),
                        outline: vec![c, p, q],
                    });
                }
            }
        }
    }
    Ok(pieces)
}

/// `c_k` over the lattice points of `bx`.
pub fn conv_rectangle(a: &[u64], b: &[u64], bx: &IntBox, plan: &NttPlan) -> Result<DiagonalSums> {
    let ctx = Ctx::new(a, b, plan)?;
    let mut acc = DiagonalSums::for_box(bx, plan.modulus());
    ctx.rect_into(&mut acc, bx, 1);
    Ok(acc)
}

/// Right triangle with one horizontal and one vertical edge, under its flags.
pub fn conv_right_triangle(
    a: &[u64],
    b: &[u64],
    tri: &ConvexPolygon,
    plan: &NttPlan,
) -> Result<DiagonalSums> {
    let ctx = Ctx::new(a, b, plan)?;
    let pts = tri.scaled_vertices();
    let c = match (tri.len(), right_corner(pts)) {
        (3, Some(c)) => c,
        _ => {
            return Err(Error::Shape(
                "expected a triangle with a horizontal and a vertical edge".into(),
            ))
        }
    };
    let t = RightTriangle::from_scaled(pts[c], pts[(c + 1) % 3], pts[(c + 2) % 3], tri.scale())
        .expect("nondegenerate");
    let mut acc = DiagonalSums::for_box(&tri.bounding_box(), plan.modulus());
    ctx.right_triangle_into(&mut acc, t, 1);
    // Catheti are edges c-1 -> c and c -> c+1; the hypotenuse is c+1 -> c+2.
    let mut internal = BoundaryFlags::uniform(3, false);
    internal.edges[(c + 2) % 3] = true;
    internal.edges[c] = true;
    internal.vertices[c] = true;
    Ok(boundary_correction(
        acc,
        tri,
        &internal,
        &BoundaryFlags::of(tri),
        a,
        b,
    ))
}

pub fn conv_triangle(
    a: &[u64],
    b: &[u64],
    tri: &ConvexPolygon,
    plan: &NttPlan,
) -> Result<DiagonalSums> {
    let ctx = Ctx::new(a, b, plan)?;
    let mut acc = DiagonalSums::for_box(&tri.bounding_box(), plan.modulus());
    ctx.triangle_into(&mut acc, tri)?;
    Ok(acc)
}

/// Diagonal sums over any convex polygon, under its flags.
pub fn conv_polygon(
    a: &[u64],
    b: &[u64],
    poly: &ConvexPolygon,
    plan: &NttPlan,
) -> Result<DiagonalSums> {
    let ctx = Ctx::new(a, b, plan)?;
    let mut acc = DiagonalSums::for_box(&poly.bounding_box(), plan.modulus());
    if acc.is_empty() {
        return Ok(acc);
    }
    ctx.open_polygon_into(&mut acc, poly)?;
    Ok(boundary_correction(
        acc,
        poly,
        &BoundaryFlags::uniform(poly.len(), false),
        &BoundaryFlags::of(poly),
        a,
        b,
    ))
}

/// Moves `sums` from one boundary convention of `piece` to another by adding
/// or removing `a_i * b_j` for each boundary lattice point whose inclusion
/// differs.
pub fn boundary_correction(
    mut sums: DiagonalSums,
    piece: &ConvexPolygon,
    internal: &BoundaryFlags,
    requested: &BoundaryFlags,
    a: &[u64],
    b: &[u64],
) -> DiagonalSums {
    let p = sums.modulus;
    let apply = |sums: &mut DiagonalSums, (i, j): (i64, i64), add: bool| {
        let w = mul_mod(value_at(a, i) % p, value_at(b, j) % p, p);
        if w == 0 {
            return;
        }
        let s = sums.slot(i + j);
        *s = if add { add_mod(*s, w, p) } else { sub_mod(*s, w, p) };
    };
    for e in 0..piece.len() {
        if internal.edges[e] != requested.edges[e] {
            for q in piece.edge_lattice_points(e) {
                apply(&mut sums, q, requested.edges[e]);
            }
        }
    }
    for v in 0..piece.len() {
        if internal.vertices[v] != requested.vertices[v] {
            if let Some(q) = piece.vertex_lattice_point(v) {
                apply(&mut sums, q, requested.vertices[v]);
            }
        }
    }
    sums
}
