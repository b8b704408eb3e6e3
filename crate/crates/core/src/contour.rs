//! Zero-level contours of a scalar field on a rectangular grid.
//!
//! Plain marching squares: the field is sampled on `nx × ny` nodes (rows in
//! parallel), each cell contributes up to two line pieces with endpoints
//! linearly interpolated along its edges, and the pieces are chained into
//! polylines through shared edges. Saddle cells are split according to the
//! sign at the cell centre. Nodes where the field returns `None` are masked
//! and every cell touching them is skipped.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxRegion {
    pub re_min: f64,
    pub im_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl BoxRegion {
    pub fn new(re_min: f64, im_min: f64, re_max: f64, im_max: f64) -> Result<BoxRegion> {
        let ok = [re_min, im_min, re_max, im_max].iter().all(|v| v.is_finite()) && re_max > re_min && im_max > im_min;
        if !ok {
            return Err(Error::DegenerateBox { re_min, im_min, re_max, im_max });
        }
        Ok(BoxRegion { re_min, im_min, re_max, im_max })
    }

    /// Square of the given half-width centred at the origin.
    pub fn square(half_width: f64) -> Result<BoxRegion> {
        BoxRegion::new(-half_width, -half_width, half_width, half_width)
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

/// Traced contour: polylines (closed ones repeat their first point at the end).
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSegments {
    pub segments: Vec<Vec<Complex64>>,
    pub bbox: BoxRegion,
    pub nx: usize,
    pub ny: usize,
}

impl CurveSegments {
    pub fn cell_width(&self) -> f64 {
        self.bbox.width() / (self.nx - 1) as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.bbox.height() / (self.ny - 1) as f64
    }

    pub fn cell_diagonal(&self) -> f64 {
        self.cell_width().hypot(self.cell_height())
    }

    pub fn point_count(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.segments.iter().flatten().copied()
    }

    /// Euclidean distance from `z` to the nearest polyline piece; infinite
    /// when there is no curve at all.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for line in &self.segments {
            if line.len() == 1 {
                best = best.min((line[0] - z).norm());
            }
            for w in line.windows(2) {
                best = best.min(point_segment_distance(z, w[0], w[1]));
            }
        }
        best
    }
}

fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

const NONE: usize = usize::MAX;

/// Trace the zero set of `field` over `bbox` sampled on an `nx × ny` grid.
pub fn trace_curve<F>(field: F, bbox: BoxRegion, nx: usize, ny: usize) -> Result<CurveSegments>
where
    F: Fn(Complex64) -> Option<f64> + Sync,
{
    let grid = Grid::new(bbox, nx, ny)?;
    let values: Vec<Vec<Option<f64>>> = (0..ny)
        .into_par_iter()
        .map(|j| (0..nx).map(|i| field(grid.node(i, j)).filter(|v| v.is_finite())).collect())
        .collect();
    let cells: Vec<Vec<Option<[f64; 4]>>> = (0..ny - 1)
        .map(|j| {
            (0..nx - 1)
                .map(|i| match [values[j][i], values[j][i + 1], values[j + 1][i + 1], values[j + 1][i]] {
                    [Some(sw), Some(se), Some(ne), Some(nw)] => Some([sw, se, ne, nw]),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let centre = |i, j, _: &[f64; 4]| field(grid.centre(i, j)).filter(|v| v.is_finite());
    let refine = |z0, v0, z1, v1| refine_crossing(|z| field(z).filter(|v| v.is_finite()), z0, v0, z1, v1);
    Ok(grid.march(&cells, centre, refine))
}

/// Linear interpolation of the zero of `v` between `z0` and `z1`, given
/// values of opposite sign.
pub(crate) fn interpolate(z0: Complex64, v0: f64, z1: Complex64, v1: f64) -> Complex64 {
    let t = (v0 / (v0 - v1)).clamp(0.0, 1.0);
    z0 + (z1 - z0) * t
}

const REFINE_STEPS: usize = 40;

/// Zero of `field` on the segment `z0..z1` by the Illinois variant of
/// regula falsi, starting from values of opposite sign. Falls back to the
/// current bracket's interpolant if the field is undefined somewhere inside.
pub(crate) fn refine_crossing<F>(field: F, z0: Complex64, v0: f64, z1: Complex64, v1: f64) -> Complex64
where
    F: Fn(Complex64) -> Option<f64>,
{
    let (mut a, mut fa, mut b, mut fb) = (0.0, v0, 1.0, v1);
    let at = |t: f64| z0 + (z1 - z0) * t;
    let mut side = 0;
    for _ in 0..REFINE_STEPS {
        let t = (a * fb - b * fa) / (fb - fa);
        if !(t > a && t < b) || b - a <= 4.0 * f64::EPSILON {
            break;
        }
        let Some(ft) = field(at(t)) else { break };
        if ft == 0.0 {
            return at(t);
        }
        if (ft >= 0.0) == (fa >= 0.0) {
            (a, fa) = (t, ft);
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            (b, fb) = (t, ft);
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    interpolate(at(a), fa, at(b), fb)
}

/// Sampling lattice of a box; node `(i, j)` sits at
/// `re_min + i dx + (im_min + j dy) i`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Grid {
    pub bbox: BoxRegion,
    pub nx: usize,
    pub ny: usize,
    dx: f64,
    dy: f64,
}

impl Grid {
    pub fn new(bbox: BoxRegion, nx: usize, ny: usize) -> Result<Grid> {
        let bbox = BoxRegion::new(bbox.re_min, bbox.im_min, bbox.re_max, bbox.im_max)?;
        if nx < 2 || ny < 2 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        let dx = bbox.width() / (nx - 1) as f64;
        let dy = bbox.height() / (ny - 1) as f64;
        Ok(Grid { bbox, nx, ny, dx, dy })
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.bbox.re_min + i as f64 * self.dx, self.bbox.im_min + j as f64 * self.dy)
    }

    pub fn centre(&self, i: usize, j: usize) -> Complex64 {
        self.node(i, j) + Complex64::new(0.5 * self.dx, 0.5 * self.dy)
    }

    /// Marching squares over per-cell corner values `[sw, se, ne, nw]`
    /// (`None` skips the cell). The values of one cell need only be
    /// consistent within that cell up to a common sign. `centre` resolves
    /// saddles; without it the corner mean is used.
    /// `refine(z0, v0, z1, v1)` places the crossing on a cut edge.
    pub fn march<M, R>(&self, cells: &[Vec<Option<[f64; 4]>>], centre: M, refine: R) -> CurveSegments
    where
        M: Fn(usize, usize, &[f64; 4]) -> Option<f64>,
        R: Fn(Complex64, f64, Complex64, f64) -> Complex64,
    {
        let (nx, ny) = (self.nx, self.ny);
        // edge ids: horizontal (i,j)-(i+1,j) first, then vertical (i,j)-(i,j+1)
        let h_id = |i: usize, j: usize| j * (nx - 1) + i;
        let v_id = |i: usize, j: usize| (nx - 1) * ny + j * nx + i;
        let n_edges = (nx - 1) * ny + nx * (ny - 1);
        let mut edge_point = vec![Complex64::new(0.0, 0.0); n_edges];
        let mut placed = vec![false; n_edges];

        let mut pieces: Vec<[usize; 2]> = Vec::new();
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let Some(v) = cells[j][i] else { continue };
                let [sw, se, ne, nw] = v;
                let pos = [sw >= 0.0, se >= 0.0, ne >= 0.0, nw >= 0.0];
                let (s, e, n, w) = (h_id(i, j), v_id(i + 1, j), h_id(i, j + 1), v_id(i, j));
                let node = |a: usize, b: usize| self.node(a, b);
                let mut cut = |id: usize, z0, v0, z1, v1| {
                    if !placed[id] {
                        edge_point[id] = refine(z0, v0, z1, v1);
                        placed[id] = true;
                    }
                    id
                };
                let s_cut = (pos[0] != pos[1]).then(|| cut(s, node(i, j), sw, node(i + 1, j), se));
                let e_cut = (pos[1] != pos[2]).then(|| cut(e, node(i + 1, j), se, node(i + 1, j + 1), ne));
                let n_cut = (pos[3] != pos[2]).then(|| cut(n, node(i, j + 1), nw, node(i + 1, j + 1), ne));
                let w_cut = (pos[0] != pos[3]).then(|| cut(w, node(i, j), sw, node(i, j + 1), nw));
                let cuts: Vec<usize> = [s_cut, e_cut, n_cut, w_cut].into_iter().flatten().collect();
                match cuts.len() {
                    0 => {}
                    2 => pieces.push([cuts[0], cuts[1]]),
                    4 => {
                        let c = centre(i, j, &v).unwrap_or(0.25 * (sw + se + ne + nw));
                        // the centre joins the two diagonal corners sharing its sign
                        if (c >= 0.0) == pos[0] {
                            // SW and NE connected: cut off SE and NW
                            pieces.push([s, e]);
                            pieces.push([w, n]);
                        } else {
                            pieces.push([s, w]);
                            pieces.push([e, n]);
                        }
                    }
                    _ => unreachable!("a square has an even number of sign changes"),
                }
            }
        }

        let segments = assemble(&pieces, &edge_point, n_edges);
        CurveSegments { segments, bbox: self.bbox, nx, ny }
    }
}

// Chain pieces that share edge ids. Every edge borders at most two cells, so
// the piece graph is a disjoint union of paths and cycles.
fn assemble(pieces: &[[usize; 2]], edge_point: &[Complex64], n_edges: usize) -> Vec<Vec<Complex64>> {
    let mut incident = vec![[NONE; 2]; n_edges];
    for (p, ends) in pieces.iter().enumerate() {
        for &e in ends {
            let slot = if incident[e][0] == NONE { 0 } else { 1 };
            incident[e][slot] = p;
        }
    }
    let degree = |e: usize| incident[e].iter().filter(|&&p| p != NONE).count();
    let mut used = vec![false; pieces.len()];
    let mut out = Vec::new();

    let walk = |start_piece: usize, start_edge: usize, used: &mut Vec<bool>| {
        let mut line = vec![edge_point[start_edge]];
        let (mut piece, mut edge) = (start_piece, start_edge);
        loop {
            used[piece] = true;
            let ends = pieces[piece];
            edge = if ends[0] == edge { ends[1] } else { ends[0] };
            line.push(edge_point[edge]);
            let next = incident[edge].iter().copied().find(|&p| p != NONE && !used[p]);
            match next {
                Some(p) => piece = p,
                None => break,
            }
        }
        line
    };

    // open chains start at edges touched by a single piece
    for p in 0..pieces.len() {
        if used[p] {
            continue;
        }
        if let Some(&e) = pieces[p].iter().find(|&&e| degree(e) == 1) {
            out.push(walk(p, e, &mut used));
        }
    }
    for p in 0..pieces.len() {
        if !used[p] {
            out.push(walk(p, pieces[p][0], &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_axis_on_coarse_grid() {
        let bbox = BoxRegion::new(-1.0, -1.0, 1.0, 1.0).unwrap();
        let c = trace_curve(|z| Some(z.im), bbox, 3, 3).unwrap();
        assert_eq!(c.segments.len(), 1);
        let line = &c.segments[0];
        assert_eq!(line.len(), 3);
        assert!(line.iter().all(|z| z.im == 0.0));
        let mut re: Vec<f64> = line.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![-1.0, 0.0, 1.0]);
    }

    fn max_radial_deviation(n: usize) -> (usize, f64) {
        let bbox = BoxRegion::square(1.5).unwrap();
        let c = trace_curve(|z| Some(z.norm_sqr() - 1.0), bbox, n, n).unwrap();
        let dev = c.points().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        (c.segments.len(), dev)
    }

    #[test]
    fn unit_circle_is_traced_at_every_resolution() {
        // crossings are refined onto the circle itself, not just interpolated
        for n in [16, 32, 64, 128] {
            let (count, dev) = max_radial_deviation(n);
            assert_eq!(count, 1);
            assert!(dev < 1e-12, "{n}: {dev}");
        }
    }

    #[test]
    fn closed_loop_repeats_start() {
        let bbox = BoxRegion::square(1.5).unwrap();
        let c = trace_curve(|z| Some(z.norm_sqr() - 1.0), bbox, 40, 40).unwrap();
        let line = &c.segments[0];
        assert_eq!(line.first(), line.last());
        let diag = c.cell_diagonal();
        assert!(line.windows(2).all(|w| (w[1] - w[0]).norm() <= diag));
        assert!(line.iter().all(|&z| bbox.contains(z)));
    }

    #[test]
    fn saddle_uses_centre_value() {
        // xy has a saddle at the origin; offset so the centre value decides
        let bbox = BoxRegion::new(-1.0, -1.0, 1.0, 1.0).unwrap();
        let plus = trace_curve(|z| Some(z.re * z.im + 0.1), bbox, 2, 2).unwrap();
        let minus = trace_curve(|z| Some(z.re * z.im - 0.1), bbox, 2, 2).unwrap();
        assert_eq!(plus.segments.len(), 2);
        assert_eq!(minus.segments.len(), 2);
        // with a positive centre the curve hugs the negative corners SE and NW
        let near = |c: &CurveSegments, corner: Complex64| c.segments.iter().any(|l| l.iter().all(|z| (z - corner).norm() < 1.5));
        assert!(near(&plus, Complex64::new(1.0, -1.0)) && near(&plus, Complex64::new(-1.0, 1.0)));
        assert!(near(&minus, Complex64::new(-1.0, -1.0)) && near(&minus, Complex64::new(1.0, 1.0)));
    }

    #[test]
    fn masked_nodes_are_skipped() {
        let bbox = BoxRegion::new(-1.0, -1.0, 1.0, 1.0).unwrap();
        let c = trace_curve(|z| if z.re == 0.0 && z.im == 0.0 { None } else { Some(z.im) }, bbox, 3, 3).unwrap();
        assert!(c.segments.is_empty());
        let c = trace_curve(|z| if z.norm() < 0.1 { None } else { Some(z.im) }, bbox, 5, 5).unwrap();
        // the two cells on each side of the masked origin drop out, leaving two pieces
        assert_eq!(c.segments.len(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(BoxRegion::new(0.0, 0.0, 0.0, 1.0), Err(Error::DegenerateBox { .. })));
        assert!(matches!(BoxRegion::new(0.0, 1.0, 1.0, f64::NAN), Err(Error::DegenerateBox { .. })));
        let bbox = BoxRegion::square(1.0).unwrap();
        assert!(matches!(trace_curve(|z| Some(z.im), bbox, 1, 5), Err(Error::GridTooSmall { nx: 1, ny: 5 })));
        let flat = BoxRegion { re_min: 0.0, im_min: 0.0, re_max: 1.0, im_max: 0.0 };
        assert!(matches!(trace_curve(|z| Some(z.im), flat, 4, 4), Err(Error::DegenerateBox { .. })));
    }

    #[test]
    fn distance_to_polyline() {
        let bbox = BoxRegion::new(-1.0, -1.0, 1.0, 1.0).unwrap();
        let c = trace_curve(|z| Some(z.im), bbox, 3, 3).unwrap();
        assert!((c.distance_to(Complex64::new(0.3, 0.25)) - 0.25).abs() < 1e-15);
        assert!((c.distance_to(Complex64::new(2.0, 0.0)) - 1.0).abs() < 1e-15);
        let empty = CurveSegments { segments: vec![], bbox, nx: 3, ny: 3 };
        assert_eq!(empty.distance_to(Complex64::new(0.0, 0.0)), f64::INFINITY);
    }
}
