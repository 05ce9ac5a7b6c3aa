//! Built-in triangulations of spheres, flat tori and their products.

use std::collections::HashMap;

use super::SimplicialComplex;
use crate::error::{Error, Result};

/// `∂Δ^{k+1}`, a triangulated `S^k` with vertices on the unit sphere of `ℝ^{k+1}`.
pub fn sphere_boundary(k: usize) -> Result<SimplicialComplex> {
    if k == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be at least 1".into()));
    }
    let nv = k + 2;
    // Regular simplex: standard basis of ℝ^{k+2}, centered, then expressed in an
    // orthonormal basis of the hyperplane Σx = 0 and normalized.
    let centered: Vec<Vec<f64>> = (0..nv)
        .map(|i| (0..nv).map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / nv as f64).collect())
        .collect();
    let basis = hyperplane_basis(nv);
    let coords: Vec<Vec<f64>> = centered
        .iter()
        .map(|x| {
            let y: Vec<f64> = basis.iter().map(|b| b.iter().zip(x).map(|(p, q)| p * q).sum()).collect();
            let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.into_iter().map(|v| v / r).collect()
        })
        .collect();
    let tops: Vec<Vec<usize>> = (0..nv).map(|skip| (0..nv).filter(|&v| v != skip).collect()).collect();
    SimplicialComplex::from_top_simplices(k, nv, &tops, Some(coords), None)
}

/// Orthonormal basis of `{x ∈ ℝⁿ : Σx = 0}` by Gram–Schmidt on `e_i − e_{i+1}`.
fn hyperplane_basis(n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..n - 1 {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v[i + 1] = -1.0;
        for b in &basis {
            let c: f64 = b.iter().zip(&v).map(|(p, q)| p * q).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(v.into_iter().map(|x| x / r).collect());
    }
    basis
}

/// Icosahedron refined `subdivisions` times by edge midpoints, projected to the unit sphere.
pub fn icosphere(subdivisions: usize) -> Result<SimplicialComplex> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for v in &mut verts {
        normalize3(v);
    }
    for _ in 0..subdivisions {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let mut m = [0.0; 3];
                for c in 0..3 {
                    m[c] = 0.5 * (verts[a][c] + verts[b][c]);
                }
                normalize3(&mut m);
                verts.push(m);
                verts.len() - 1
            })
        };
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut verts);
            let bc = midpoint(f[1], f[2], &mut verts);
            let ca = midpoint(f[2], f[0], &mut verts);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    let coords: Vec<Vec<f64>> = verts.iter().map(|v| v.to_vec()).collect();
    let tops: Vec<Vec<usize>> = faces.iter().map(|f| f.to_vec()).collect();
    SimplicialComplex::from_top_simplices(2, coords.len(), &tops, Some(coords), None)
}

fn normalize3(v: &mut [f64; 3]) {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.iter_mut().for_each(|x| *x /= r);
}

/// Circle of the given length as `n` points on a periodic coordinate.
pub fn circle(n: usize, length: f64) -> Result<SimplicialComplex> {
    if n < 3 {
        return Err(Error::InvalidArgument("a circle needs at least 3 vertices".into()));
    }
    let h = length / n as f64;
    let coords: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * h]).collect();
    let tops: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    SimplicialComplex::from_top_simplices(1, n, &tops, Some(coords), Some(vec![Some(length)]))
}

/// Freudenthal (Kuhn) triangulation of the flat torus `ℝ^d / (side·ℤ)^d` with `n` cells per
/// axis: each cube is cut into `d!` simplices along its main diagonal.
pub fn flat_torus(d: usize, n: usize, side: f64) -> Result<SimplicialComplex> {
    if !(1..=4).contains(&d) {
        return Err(Error::InvalidArgument(format!("torus dimension {d} not in 1..=4")));
    }
    if n < 3 {
        return Err(Error::InvalidArgument("a torus grid needs at least 3 cells per axis".into()));
    }
    let nv = n.pow(d as u32);
    let h = side / n as f64;
    let to_multi = |mut v: usize| -> Vec<usize> {
        (0..d)
            .map(|_| {
                let c = v % n;
                v /= n;
                c
            })
            .collect()
    };
    let to_index = |x: &[usize]| -> usize { x.iter().rev().fold(0, |acc, &c| acc * n + (c % n)) };
    let coords: Vec<Vec<f64>> = (0..nv).map(|v| to_multi(v).iter().map(|&c| c as f64 * h).collect()).collect();
    let perms = permutations(d);
    let mut tops = Vec::with_capacity(nv * perms.len());
    for v in 0..nv {
        let base = to_multi(v);
        for p in &perms {
            let mut x = base.clone();
            let mut s = vec![to_index(&x)];
            for &axis in p {
                x[axis] += 1;
                s.push(to_index(&x));
            }
            tops.push(s);
        }
    }
    SimplicialComplex::from_top_simplices(d, nv, &tops, Some(coords), Some(vec![Some(side); d]))
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out
}

/// Staircase triangulation of `A × B`: product vertex `(a, b)` gets index `a·|B| + b`, and each
/// pair of top simplices contributes one simplex per monotone lattice path.
pub fn product(a: &SimplicialComplex, b: &SimplicialComplex) -> Result<SimplicialComplex> {
    let (p, q) = (a.dim(), b.dim());
    let nb = b.num_vertices();
    let nv = a.num_vertices() * nb;
    let paths = lattice_paths(p, q);
    let mut tops = Vec::with_capacity(a.count(p) * b.count(q) * paths.len());
    for s in a.simplices(p) {
        for t in b.simplices(q) {
            for path in &paths {
                tops.push(path.iter().map(|&(i, j)| s[i] * nb + t[j]).collect());
            }
        }
    }
    let coords = match (a.coordinates(), b.coordinates()) {
        (Some(ca), Some(cb)) => Some(
            (0..nv)
                .map(|v| {
                    let mut row = ca[v / nb].clone();
                    row.extend_from_slice(&cb[v % nb]);
                    row
                })
                .collect(),
        ),
        _ => None,
    };
    let periods = match (a.periods(), b.periods()) {
        (None, None) => None,
        _ => {
            let wa = a.coordinates().map_or(0, |c| c[0].len());
            let wb = b.coordinates().map_or(0, |c| c[0].len());
            let mut p = a.periods().map_or(vec![None; wa], <[_]>::to_vec);
            p.extend(b.periods().map_or(vec![None; wb], <[_]>::to_vec));
            Some(p)
        }
    };
    SimplicialComplex::from_top_simplices(p + q, nv, &tops, coords, periods)
}

/// Monotone paths from `(0,0)` to `(p,q)` as vertex lists.
fn lattice_paths(p: usize, q: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(i: usize, j: usize, p: usize, q: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if i == p && j == q {
            out.push(cur.clone());
            return;
        }
        if i < p {
            cur.push((i + 1, j));
            rec(i + 1, j, p, q, cur, out);
            cur.pop();
        }
        if j < q {
            cur.push((i, j + 1));
            rec(i, j + 1, p, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 0, p, q, &mut vec![(0, 0)], &mut out);
    out
}

/// Named generator used by the command line and the catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshSpec {
    Sphere { k: usize },
    Icosphere { subdivisions: usize },
    Circle { n: usize, length: f64 },
    Torus { d: usize, n: usize, side: f64 },
    Product(Box<MeshSpec>, Box<MeshSpec>),
}

impl MeshSpec {
    pub fn build(&self) -> Result<SimplicialComplex> {
        match self {
            MeshSpec::Sphere { k } => sphere_boundary(*k),
            MeshSpec::Icosphere { subdivisions } => icosphere(*subdivisions),
            MeshSpec::Circle { n, length } => circle(*n, *length),
            MeshSpec::Torus { d, n, side } => flat_torus(*d, *n, *side),
            MeshSpec::Product(a, b) => product(&a.build()?, &b.build()?),
        }
    }
}

fn fmt_length(x: f64) -> String {
    if x == std::f64::consts::TAU {
        "tau".into()
    } else {
        format!("{x}")
    }
}

impl std::fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeshSpec::Sphere { k } => write!(f, "sphere({k})"),
            MeshSpec::Icosphere { subdivisions } => write!(f, "icosphere({subdivisions})"),
            MeshSpec::Circle { n, length } => write!(f, "circle({n},{})", fmt_length(*length)),
            MeshSpec::Torus { d, n, side } => write!(f, "torus({d},{n},{})", fmt_length(*side)),
            MeshSpec::Product(a, b) => write!(f, "product({a},{b})"),
        }
    }
}

/// Recursive-descent parser for `name(arg, …)` generator strings.
struct SpecParser<'a> {
    src: &'a str,
    pos: usize,
}

impl SpecParser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("mesh spec `{}` at column {}: {what}", self.src, self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn token(&mut self) -> &str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || "._-+".contains(c))).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn count(&mut self) -> Result<usize> {
        let t = self.token().to_string();
        t.parse().map_err(|_| self.err(&format!("expected a nonnegative integer, found `{t}`")))
    }

    fn length(&mut self) -> Result<f64> {
        let t = self.token().to_string();
        match t.as_str() {
            "tau" | "2pi" => Ok(std::f64::consts::TAU),
            "pi" => Ok(std::f64::consts::PI),
            _ => t
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 0.0)
                .ok_or_else(|| self.err(&format!("expected a positive length, found `{t}`"))),
        }
    }

    fn comma(&mut self) -> Result<()> {
        if self.eat(',') {
            Ok(())
        } else {
            Err(self.err("expected `,`"))
        }
    }

    fn spec(&mut self) -> Result<MeshSpec> {
        let name = self.token().to_ascii_lowercase();
        if !self.eat('(') {
            return Err(self.err("expected `(`"));
        }
        let spec = match name.as_str() {
            "sphere" => MeshSpec::Sphere { k: self.count()? },
            "icosphere" => MeshSpec::Icosphere {
                subdivisions: self.count()?,
            },
            "circle" => {
                let n = self.count()?;
                self.comma()?;
                MeshSpec::Circle { n, length: self.length()? }
            }
            "torus" => {
                let d = self.count()?;
                self.comma()?;
                let n = self.count()?;
                self.comma()?;
                MeshSpec::Torus { d, n, side: self.length()? }
            }
            "product" => {
                let a = self.spec()?;
                self.comma()?;
                MeshSpec::Product(Box::new(a), Box::new(self.spec()?))
            }
            other => return Err(self.err(&format!("unknown generator `{other}`"))),
        };
        if !self.eat(')') {
            return Err(self.err("expected `)`"));
        }
        Ok(spec)
    }
}

/// Parses strings such as `sphere(4)`, `torus(3,8,tau)` or `product(icosphere(1),circle(5,tau))`.
impl std::str::FromStr for MeshSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = SpecParser { src: s, pos: 0 };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn spec_strings_round_trip() {
        for s in ["sphere(4)", "icosphere(1)", "circle(5,tau)", "torus(3,8,2.5)", "product(icosphere(1),circle(5,tau))"] {
            let spec: MeshSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let spec: MeshSpec = " product( sphere(2) , torus(2, 4, pi) ) ".parse().unwrap();
        assert_eq!(spec.build().unwrap().betti().values, vec![1, 2, 2, 2, 1]);
        for bad in ["sphere", "sphere(x)", "circle(5)", "blob(2)", "sphere(2))", "circle(5,-1)"] {
            assert!(bad.parse::<MeshSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spheres_have_sphere_homology() {
        for k in 1..=5 {
            let s = sphere_boundary(k).unwrap();
            let mut expected = vec![0; k + 1];
            expected[0] = 1;
            expected[k] = 1;
            assert_eq!(s.betti().values, expected, "S^{k}");
            let c = s.coordinates().unwrap();
            for row in c {
                let r: f64 = row.iter().map(|x| x * x).sum();
                assert!((r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn icosphere_counts() {
        let s = icosphere(2).unwrap();
        assert_eq!(s.face_counts(), vec![162, 480, 320]);
        assert_eq!(s.betti().values, vec![1, 0, 1]);
    }

    #[test]
    fn torus_homology_is_binomial() {
        let t = flat_torus(3, 3, TAU).unwrap();
        assert_eq!(t.face_counts(), vec![27, 189, 324, 162]);
        assert_eq!(t.betti().values, vec![1, 3, 3, 1]);
        let t2 = flat_torus(2, 4, 1.0).unwrap();
        assert_eq!(t2.betti().values, vec![1, 2, 1]);
    }

    #[test]
    fn product_of_sphere_and_circle() {
        let s = product(&icosphere(0).unwrap(), &circle(4, TAU).unwrap()).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.betti().values, vec![1, 1, 1, 1]);
        assert_eq!(s.euler_characteristic(), 0);
    }

    #[test]
    fn product_of_two_spheres() {
        let s = product(&sphere_boundary(2).unwrap(), &sphere_boundary(3).unwrap()).unwrap();
        assert_eq!(s.betti().values, vec![1, 0, 1, 1, 0, 1]);
    }

    #[test]
    fn lattice_path_count_is_binomial() {
        assert_eq!(lattice_paths(2, 3).len(), 10);
        assert_eq!(lattice_paths(3, 1).len(), 4);
    }
}
