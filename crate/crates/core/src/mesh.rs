//! Triangulations of a rectangular parameter domain with labeled boundary edges.
//!
//! Triangles are stored counterclockwise with vertex 0 as the newest vertex, so
//! local edge 0 is the refinement edge. Local edge `j` is opposite vertex `j`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary condition class of a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// Clamped.
    #[serde(rename = "D")]
    Clamped,
    /// Soft simply supported.
    #[serde(rename = "S")]
    SoftSupport,
    #[serde(rename = "F")]
    Free,
}

impl BoundaryKind {
    pub fn letter(self) -> char {
        match self {
            BoundaryKind::Clamped => 'D',
            BoundaryKind::SoftSupport => 'S',
            BoundaryKind::Free => 'F',
        }
    }
}

impl FromStr for BoundaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "D" | "d" => Ok(BoundaryKind::Clamped),
            "S" | "s" => Ok(BoundaryKind::SoftSupport),
            "F" | "f" => Ok(BoundaryKind::Free),
            other => Err(Error::Config(format!("invalid boundary label '{other}', expected D, S or F"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeLabel {
    Interior,
    Boundary(BoundaryKind),
}

impl EdgeLabel {
    pub fn kind(self) -> Option<BoundaryKind> {
        match self {
            EdgeLabel::Interior => None,
            EdgeLabel::Boundary(k) => Some(k),
        }
    }

    pub fn is(self, kind: BoundaryKind) -> bool {
        self == EdgeLabel::Boundary(kind)
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    /// Endpoints ordered counterclockwise with respect to side 1.
    pub vertices: [usize; 2],
    /// `(triangle, local edge)` of side 1, the lower triangle index.
    pub side1: (usize, usize),
    pub side2: Option<(usize, usize)>,
    pub label: EdgeLabel,
    pub length: f64,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.side2.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Default for Rect {
    fn default() -> Self {
        Rect { x: [0.0, 1.0], y: [0.0, 1.0] }
    }
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.x[1] - self.x[0]) * (self.y[1] - self.y[0])
    }
}

/// Boundary labels of the four sides of a rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SideLabels {
    pub bottom: BoundaryKind,
    pub right: BoundaryKind,
    pub top: BoundaryKind,
    pub left: BoundaryKind,
}

impl SideLabels {
    pub fn all(kind: BoundaryKind) -> SideLabels {
        SideLabels { bottom: kind, right: kind, top: kind, left: kind }
    }
}

impl Default for SideLabels {
    fn default() -> Self {
        SideLabels {
            bottom: BoundaryKind::Free,
            right: BoundaryKind::Free,
            top: BoundaryKind::Free,
            left: BoundaryKind::Clamped,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// Global edge of each local edge.
    pub triangle_edges: Vec<[usize; 3]>,
    pub diameters: Vec<f64>,
}

pub enum Refinement<'a> {
    Uniform,
    Bisect(&'a [usize]),
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
}

impl Mesh {
    /// Builds a mesh and its edge structure. Every boundary edge must appear in
    /// `boundary`, keyed by its sorted endpoint pair.
    pub fn from_parts(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: &BTreeMap<(usize, usize), BoundaryKind>,
    ) -> Result<Mesh> {
        let mut edges: Vec<Edge> = Vec::new();
        let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut diameters = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            let [p, q, r] = tri.map(|v| vertices[v]);
            let area = signed_area(p, q, r);
            if !(area > 0.0) {
                return Err(Error::Mesh(format!("triangle {t} is degenerate or clockwise (area {area:e})")));
            }
            diameters.push(dist(p, q).max(dist(q, r)).max(dist(r, p)));
            let mut local = [0; 3];
            for (j, slot) in local.iter_mut().enumerate() {
                let a = tri[(j + 1) % 3];
                let b = tri[(j + 2) % 3];
                match lookup.get(&key(a, b)) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.side2.is_some() {
                            return Err(Error::Mesh(format!("edge ({a}, {b}) shared by more than two triangles")));
                        }
                        edge.side2 = Some((t, j));
                        edge.label = EdgeLabel::Interior;
                        *slot = e;
                    }
                    None => {
                        lookup.insert(key(a, b), edges.len());
                        *slot = edges.len();
                        edges.push(Edge {
                            vertices: [a, b],
                            side1: (t, j),
                            side2: None,
                            label: EdgeLabel::Interior,
                            length: dist(vertices[a], vertices[b]),
                        });
                    }
                }
            }
            triangle_edges.push(local);
        }
        for edge in edges.iter_mut().filter(|e| e.side2.is_none()) {
            let [a, b] = edge.vertices;
            let kind = boundary
                .get(&key(a, b))
                .ok_or_else(|| Error::Mesh(format!("boundary edge ({a}, {b}) has no label")))?;
            edge.label = EdgeLabel::Boundary(*kind);
        }
        Ok(Mesh { vertices, triangles, edges, triangle_edges, diameters })
    }

    /// Structured mesh with `2 n²` triangles, each grid cell split along its
    /// lower-left to upper-right diagonal.
    pub fn structured(rect: Rect, n: usize, labels: SideLabels) -> Result<Mesh> {
        if n == 0 {
            return Err(Error::Config("structured mesh needs n >= 1".into()));
        }
        let idx = |i: usize, j: usize| j * (n + 1) + i;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                let x = rect.x[0] + (rect.x[1] - rect.x[0]) * i as f64 / n as f64;
                let y = rect.y[0] + (rect.y[1] - rect.y[0]) * j as f64 / n as f64;
                vertices.push([x, y]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (p00, p10, p01, p11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
                triangles.push([p10, p11, p00]);
                triangles.push([p01, p00, p11]);
            }
        }
        let mut boundary = BTreeMap::new();
        for i in 0..n {
            boundary.insert(key(idx(i, 0), idx(i + 1, 0)), labels.bottom);
            boundary.insert(key(idx(i, n), idx(i + 1, n)), labels.top);
            boundary.insert(key(idx(0, i), idx(0, i + 1)), labels.left);
            boundary.insert(key(idx(n, i), idx(n, i + 1)), labels.right);
        }
        Mesh::from_parts(vertices, triangles, &boundary)
    }

    pub fn boundary_map(&self) -> BTreeMap<(usize, usize), BoundaryKind> {
        self.edges.iter().filter_map(|e| e.label.kind().map(|k| (key(e.vertices[0], e.vertices[1]), k))).collect()
    }

    pub fn area(&self, t: usize) -> f64 {
        let [p, q, r] = self.triangles[t].map(|v| self.vertices[v]);
        signed_area(p, q, r)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    pub fn h_max(&self) -> f64 {
        self.diameters.iter().cloned().fold(0.0, f64::max)
    }

    pub fn points(&self, t: usize) -> [[f64; 2]; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    /// Local edges of `t` carrying a free label.
    pub fn free_edges(&self, t: usize) -> Vec<usize> {
        (0..3).filter(|&j| self.edges[self.triangle_edges[t][j]].label.is(BoundaryKind::Free)).collect()
    }

    /// Flat outward unit normal of side 1 of edge `e`.
    pub fn edge_normal(&self, e: usize) -> [f64; 2] {
        let [a, b] = self.edges[e].vertices.map(|v| self.vertices[v]);
        let l = dist(a, b);
        [(b[1] - a[1]) / l, -(b[0] - a[0]) / l]
    }

    pub fn shape_regularity(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in 0..self.triangles.len() {
            worst = worst.max(triangle_shape_ratio(self.points(t))?);
        }
        Ok(worst)
    }

    pub fn refine(&self, mode: Refinement<'_>) -> Result<Mesh> {
        match mode {
            Refinement::Uniform => self.refine_uniform(),
            Refinement::Bisect(marked) => self.bisect(marked),
        }
    }

    fn refine_uniform(&self) -> Result<Mesh> {
        let mut vertices = self.vertices.clone();
        let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            *mids.entry(key(a, b)).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let mbc = midpoint(b, c, &mut vertices);
            let mca = midpoint(c, a, &mut vertices);
            let mab = midpoint(a, b, &mut vertices);
            for child in [[a, mab, mca], [mab, b, mbc], [mca, mbc, c], [mbc, mca, mab]] {
                triangles.push(newest_opposite_longest(child, &vertices));
            }
        }
        let boundary = self.split_boundary(&mids);
        Mesh::from_parts(vertices, triangles, &boundary)
    }

    fn split_boundary(&self, mids: &BTreeMap<(usize, usize), usize>) -> BTreeMap<(usize, usize), BoundaryKind> {
        let mut out = BTreeMap::new();
        for (k, kind) in self.boundary_map() {
            match mids.get(&k) {
                Some(&m) => {
                    out.insert(key(k.0, m), kind);
                    out.insert(key(m, k.1), kind);
                }
                None => {
                    out.insert(k, kind);
                }
            }
        }
        out
    }

    /// Newest-vertex bisection of the marked triangles with conforming closure.
    fn bisect(&self, marked: &[usize]) -> Result<Mesh> {
        if marked.is_empty() {
            return Err(Error::Config("marked bisection needs at least one triangle".into()));
        }
        let refinement_edge = |t: &[usize; 3]| key(t[1], t[2]);
        let mut split: std::collections::BTreeSet<(usize, usize)> = std::collections::BTreeSet::new();
        for &t in marked {
            let tri = self.triangles.get(t).ok_or_else(|| Error::Mesh(format!("marked triangle {t} out of range")))?;
            split.insert(refinement_edge(tri));
        }
        loop {
            let mut changed = false;
            for tri in &self.triangles {
                let r = refinement_edge(tri);
                if split.contains(&r) {
                    continue;
                }
                let touched = (0..3).any(|j| split.contains(&key(tri[(j + 1) % 3], tri[(j + 2) % 3])));
                if touched {
                    split.insert(r);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut vertices = self.vertices.clone();
        let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(a, b) in &split {
            let (p, q) = (vertices[a], vertices[b]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            mids.insert((a, b), vertices.len() - 1);
        }
        let mut triangles = Vec::new();
        fn recurse(tri: [usize; 3], mids: &BTreeMap<(usize, usize), usize>, out: &mut Vec<[usize; 3]>) {
            let [a, b, c] = tri;
            match mids.get(&key(b, c)) {
                Some(&m) => {
                    recurse([m, a, b], mids, out);
                    recurse([m, c, a], mids, out);
                }
                None => out.push(tri),
            }
        }
        for &tri in &self.triangles {
            recurse(tri, &mids, &mut triangles);
        }
        let boundary = self.split_boundary(&mids);
        Mesh::from_parts(vertices, triangles, &boundary)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "naghdi-mesh 1");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let boundary = self.boundary_map();
        let _ = writeln!(s, "boundary {}", boundary.len());
        for ((a, b), k) in boundary {
            let _ = writeln!(s, "{a} {b} {}", k.letter());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let bad = |what: &str| Error::Parse(format!("mesh text: {what}"));
        let body: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
        if body.first() != Some(&"naghdi-mesh 1") {
            return Err(bad("missing header"));
        }
        let mut pos = 1;
        let mut read_section = |name: &str| -> Result<Vec<Vec<&str>>> {
            let head: Vec<&str> = body.get(pos).ok_or_else(|| bad("unexpected end"))?.split_whitespace().collect();
            if head.first() != Some(&name) || head.len() != 2 {
                return Err(bad(&format!("expected section '{name}'")));
            }
            let count: usize = head[1].parse().map_err(|_| bad("bad count"))?;
            let rows = body
                .get(pos + 1..pos + 1 + count)
                .ok_or_else(|| bad("truncated section"))?
                .iter()
                .map(|l| l.split_whitespace().collect())
                .collect();
            pos += 1 + count;
            Ok(rows)
        };
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| bad(&format!("bad number '{s}'"))) };
        let int = |s: &str| -> Result<usize> { s.parse().map_err(|_| bad(&format!("bad index '{s}'"))) };
        let vertices = read_section("vertices")?
            .iter()
            .map(|r| match r.as_slice() {
                [x, y] => Ok([num(x)?, num(y)?]),
                _ => Err(bad("vertex row")),
            })
            .collect::<Result<Vec<_>>>()?;
        let triangles = read_section("triangles")?
            .iter()
            .map(|r| match r.as_slice() {
                [a, b, c] => Ok([int(a)?, int(b)?, int(c)?]),
                _ => Err(bad("triangle row")),
            })
            .collect::<Result<Vec<_>>>()?;
        let boundary = read_section("boundary")?
            .iter()
            .map(|r| match r.as_slice() {
                [a, b, k] => Ok((key(int(a)?, int(b)?), k.parse::<BoundaryKind>()?)),
                _ => Err(bad("boundary row")),
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Mesh::from_parts(vertices, triangles, &boundary)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Mesh> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path, e))?;
        Mesh::from_text(&text)
    }

    /// Same mesh with triangles listed in the order `perm` (new index i holds old `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Mesh> {
        let triangles = perm.iter().map(|&t| self.triangles[t]).collect();
        Mesh::from_parts(self.vertices.clone(), triangles, &self.boundary_map())
    }
}

/// Rotates `tri` so that vertex 0 is opposite its longest edge.
fn newest_opposite_longest(tri: [usize; 3], vertices: &[[f64; 2]]) -> [usize; 3] {
    let len = |j: usize| dist(vertices[tri[(j + 1) % 3]], vertices[tri[(j + 2) % 3]]);
    let mut best = 0;
    for j in 1..3 {
        if len(j) > len(best) * (1.0 + 1e-12) {
            best = j;
        }
    }
    [tri[best], tri[(best + 1) % 3], tri[(best + 2) % 3]]
}

/// Circumdiameter over indiameter.
pub fn triangle_shape_ratio(p: [[f64; 2]; 3]) -> Result<f64> {
    let area = signed_area(p[0], p[1], p[2]).abs();
    let (a, b, c) = (dist(p[1], p[2]), dist(p[2], p[0]), dist(p[0], p[1]));
    if !(area > 1e-14 * (a * a + b * b + c * c)) {
        return Err(Error::Mesh("degenerate triangle".into()));
    }
    let circum = a * b * c / (4.0 * area);
    let inradius = 2.0 * area / (a + b + c);
    Ok(circum / inradius)
}
