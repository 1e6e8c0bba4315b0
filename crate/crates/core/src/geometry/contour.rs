use serde::{Deserialize, Serialize};

use super::{dedup_consecutive, degenerate, FitError, Point, SimilarityTransform};

/// A closed polygonal contour in image coordinates.
///
/// Serializes as `{"closed": true, "vertices": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContourRepr", into = "ContourRepr")]
pub struct Contour {
    vertices: Vec<Point>,
}

impl Contour {
    /// Builds a contour, dropping consecutive duplicates first.
    pub fn new(vertices: Vec<Point>) -> Result<Contour, FitError> {
        let vertices = dedup_consecutive(&vertices, true);
        if vertices.len() < 3 {
            return Err(degenerate(format!("contour needs 3 distinct vertices, has {}", vertices.len())));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(degenerate(format!("non-finite vertex {p:?}")));
        }
        Ok(Contour { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn closed(&self) -> bool {
        true
    }

    pub fn transformed(&self, t: &SimilarityTransform) -> Contour {
        Contour { vertices: t.apply_all(&self.vertices) }
    }

    /// Signed shoelace area.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[i].dist(self.vertices[(i + 1) % n])).sum()
    }

    /// True when no two non-adjacent edges intersect. Quadratic, meant for diagnostics.
    pub fn is_simple(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (c, d) = (v[j], v[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

#[derive(Serialize, Deserialize)]
struct ContourRepr {
    closed: bool,
    vertices: Vec<[f64; 2]>,
}

impl From<Contour> for ContourRepr {
    fn from(c: Contour) -> Self {
        ContourRepr { closed: true, vertices: c.vertices.iter().map(|p| [p.x, p.y]).collect() }
    }
}

impl TryFrom<ContourRepr> for Contour {
    type Error = FitError;
    fn try_from(r: ContourRepr) -> Result<Self, FitError> {
        Contour::new(r.vertices.into_iter().map(|[x, y]| Point::new(x, y)).collect())
    }
}
