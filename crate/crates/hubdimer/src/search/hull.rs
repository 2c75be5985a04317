//! Three-dimensional lower convex hull of a lifted point set, used to build
//! discrete lower convex envelopes. Quickhull over the full hull with exact
//! orientation predicates; only the downward-facing facets are reported.

use std::collections::HashMap;

use robust::{orient3d, Coord3D};

#[derive(Debug, Clone, Copy)]
pub struct Plane {
    /// Outward normal (unnormalized).
    pub n: [f64; 3],
    /// A vertex of the supporting facet.
    pub p0: [f64; 3],
    /// Facet vertex indices into the input point set.
    pub verts: [usize; 3],
}

impl Plane {
    /// Height of the facet plane at `(x, y)`; callers must ensure the plane
    /// is not vertical (`n[2] != 0`).
    pub fn height(&self, x: f64, y: f64) -> f64 {
        self.p0[2] - (self.n[0] * (x - self.p0[0]) + self.n[1] * (y - self.p0[1])) / self.n[2]
    }
}

fn coord(p: &[f64; 3]) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

/// Exact sign of the orientation of `d` relative to the plane through
/// `(a, b, c)`: positive when `d` lies on the side opposite to the outward
/// normal `cross(b-a, c-a)`.
fn orient(pts: &[[f64; 3]], a: usize, b: usize, c: usize, d: &[f64; 3]) -> f64 {
    orient3d(coord(&pts[a]), coord(&pts[b]), coord(&pts[c]), coord(d))
}

#[derive(Debug, Clone)]
struct Face {
    v: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
}

struct HullState {
    faces: Vec<Face>,
    /// Directed edge `(p, q)` of an alive face -> face index.
    edge_map: HashMap<(usize, usize), usize>,
}

impl HullState {
    fn add_face(&mut self, v: [usize; 3]) -> usize {
        let fi = self.faces.len();
        self.faces.push(Face {
            v,
            outside: Vec::new(),
            alive: true,
        });
        for k in 0..3 {
            self.edge_map.insert((v[k], v[(k + 1) % 3]), fi);
        }
        fi
    }

    fn kill_face(&mut self, fi: usize) {
        let v = self.faces[fi].v;
        for k in 0..3 {
            self.edge_map.remove(&(v[k], v[(k + 1) % 3]));
        }
        self.faces[fi].alive = false;
    }

    /// Face on the other side of the directed edge `(p, q)`.
    fn neighbor(&self, p: usize, q: usize) -> Option<usize> {
        self.edge_map.get(&(q, p)).copied()
    }
}

fn is_visible(pts: &[[f64; 3]], f: &Face, p: &[f64; 3]) -> bool {
    orient(pts, f.v[0], f.v[1], f.v[2], p) < 0.0
}

/// Quickhull. Returns the lower facets (outward normal with negative z
/// component) of the convex hull of `pts`. Exactly coplanar points are
/// absorbed into facets, which is harmless for envelope evaluation.
///
/// Returns `None` when the input is degenerate (all points coplanar); the
/// caller then treats the common plane as the hull.
pub fn lower_hull(pts: &[[f64; 3]]) -> Option<Vec<Plane>> {
    let n = pts.len();
    if n < 4 {
        return None;
    }

    // initial simplex: extremes in x, then distance from the line, then from
    // the plane
    let mut i0 = 0;
    let mut i1 = 0;
    for i in 1..n {
        if pts[i][0] < pts[i0][0] {
            i0 = i;
        }
        if pts[i][0] > pts[i1][0] {
            i1 = i;
        }
    }
    if i0 == i1 {
        return None;
    }
    let mut i2 = usize::MAX;
    let mut best = 0.0;
    for i in 0..n {
        let d = cross_norm2(&pts[i0], &pts[i1], &pts[i]);
        if d > best {
            best = d;
            i2 = i;
        }
    }
    if i2 == usize::MAX || best <= 0.0 {
        return None;
    }
    let mut i3 = usize::MAX;
    let mut best = 0.0;
    for i in 0..n {
        let d = orient(pts, i0, i1, i2, &pts[i]).abs();
        if d > best {
            best = d;
            i3 = i;
        }
    }
    if i3 == usize::MAX || best <= 0.0 {
        return None;
    }

    let inner = [
        (pts[i0][0] + pts[i1][0] + pts[i2][0] + pts[i3][0]) / 4.0,
        (pts[i0][1] + pts[i1][1] + pts[i2][1] + pts[i3][1]) / 4.0,
        (pts[i0][2] + pts[i1][2] + pts[i2][2] + pts[i3][2]) / 4.0,
    ];
    let orient_out = |v: [usize; 3]| -> [usize; 3] {
        let mut v = v;
        if orient(pts, v[0], v[1], v[2], &inner) < 0.0 {
            v.swap(1, 2);
        }
        v
    };

    let mut st = HullState {
        faces: Vec::with_capacity(2 * n),
        edge_map: HashMap::with_capacity(6 * n),
    };
    for v in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        st.add_face(orient_out(v));
    }

    // conflict lists
    let skip = [i0, i1, i2, i3];
    for i in 0..n {
        if skip.contains(&i) {
            continue;
        }
        for fi in 0..4 {
            if is_visible(pts, &st.faces[fi], &pts[i]) {
                st.faces[fi].outside.push(i);
                break;
            }
        }
    }

    let mut stack: Vec<usize> = (0..4).collect();
    let mut seen_stamp = vec![0u32; 0];
    let mut stamp = 0u32;
    while let Some(fi) = stack.pop() {
        if !st.faces[fi].alive || st.faces[fi].outside.is_empty() {
            continue;
        }
        let face_v = st.faces[fi].v;
        let (far, _) = st.faces[fi]
            .outside
            .iter()
            .map(|&i| (i, -orient(pts, face_v[0], face_v[1], face_v[2], &pts[i])))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let p = pts[far];

        // visible region by BFS across edges
        seen_stamp.resize(st.faces.len(), 0);
        stamp += 1;
        let mut visible = vec![fi];
        seen_stamp[fi] = stamp;
        let mut queue = vec![fi];
        while let Some(q) = queue.pop() {
            let v = st.faces[q].v;
            for k in 0..3 {
                if let Some(nb) = st.neighbor(v[k], v[(k + 1) % 3]) {
                    if seen_stamp[nb] != stamp
                        && st.faces[nb].alive
                        && is_visible(pts, &st.faces[nb], &p)
                    {
                        seen_stamp[nb] = stamp;
                        visible.push(nb);
                        queue.push(nb);
                    }
                }
            }
        }

        // horizon: directed edges of visible faces whose neighbor is hidden
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &vf in &visible {
            let v = st.faces[vf].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                match st.neighbor(a, b) {
                    Some(nb) if seen_stamp[nb] == stamp => {}
                    Some(_) => horizon.push((a, b)),
                    None => {}
                }
            }
        }
        if horizon.is_empty() {
            let pos = st.faces[fi].outside.iter().position(|&i| i == far).unwrap();
            st.faces[fi].outside.swap_remove(pos);
            stack.push(fi);
            continue;
        }

        // collect orphaned conflict points and retire visible faces
        let mut orphans: Vec<usize> = Vec::new();
        for &vf in &visible {
            orphans.append(&mut st.faces[vf].outside);
            st.kill_face(vf);
        }
        orphans.retain(|&i| i != far);

        // build the cone of new faces over the horizon
        let first_new = st.faces.len();
        for &(ea, eb) in &horizon {
            st.add_face(orient_out([ea, eb, far]));
        }

        // redistribute orphans
        for i in orphans {
            for nf in first_new..st.faces.len() {
                if is_visible(pts, &st.faces[nf], &pts[i]) {
                    st.faces[nf].outside.push(i);
                    break;
                }
            }
            // points not visible from any new face are inside the hull now
        }
        for nf in first_new..st.faces.len() {
            if !st.faces[nf].outside.is_empty() {
                stack.push(nf);
            }
        }
    }

    let mut planes = Vec::new();
    for f in &st.faces {
        if !f.alive {
            continue;
        }
        let a = pts[f.v[0]];
        let b = pts[f.v[1]];
        let c = pts[f.v[2]];
        let nvec = [
            (b[1] - a[1]) * (c[2] - a[2]) - (b[2] - a[2]) * (c[1] - a[1]),
            (b[2] - a[2]) * (c[0] - a[0]) - (b[0] - a[0]) * (c[2] - a[2]),
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]),
        ];
        let scale = nvec[0].abs() + nvec[1].abs() + nvec[2].abs();
        if nvec[2] < -1e-12 * scale {
            planes.push(Plane {
                n: nvec,
                p0: a,
                verts: f.v,
            });
        }
    }
    Some(planes)
}

fn cross_norm2(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let w = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
}
