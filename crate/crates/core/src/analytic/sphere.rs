//! Solid angles of simplicial cones `{x : n_i . x > 0}` in the sum-zero
//! subspace of R^6, as normalized spherical-simplex volumes.
//!
//! Up to three normals the volume has a closed form (half-space, wedge,
//! Gauss–Bonnet triangle). Four and five normals are reached by deforming a
//! new normal `w(t) = (1 - t) donor + t target` away from an existing one and
//! integrating Schläfli's differential
//! `dVol_n = 1/(n-1) * sum Vol_{n-2}(F_jk) dalpha_jk` over t. All Gram
//! matrices, vertex Gram matrices and angle arguments are computed exactly
//! in rationals at each quadrature node; only the final arctangents and
//! square roots are taken in floating point.

use super::systems::Constraint;
use super::AnalyticError;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cell::Cell;
use std::f64::consts::PI;

/// An exact normal vector in R^6.
pub type Normal = [Ratio<i64>; 6];

pub const MAX_NORMALS: usize = 5;

/// Default absolute tolerance for each Schläfli integral.
pub const DEFAULT_TOL: f64 = 1e-10;

pub fn normal(coeffs: [i64; 6]) -> Normal {
    coeffs.map(Ratio::from_integer)
}

pub fn constraint_normal(c: &Constraint) -> Normal {
    normal(c.coeffs)
}

fn big(q: &Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

fn dot(a: &Normal, b: &Normal) -> BigRational {
    a.iter().zip(b).map(|(x, y)| big(x) * big(y)).sum()
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `atan2(sqrt(s), c)` for exact `s >= 0`, evaluated through the
/// scale-free ratio `s / c^2`.
fn angle(s: &BigRational, c: &BigRational) -> f64 {
    if c.is_zero() {
        return PI / 2.0;
    }
    let r = to_f64(&(s / (c * c))).max(0.0).sqrt().atan();
    if c.is_positive() {
        r
    } else {
        PI - r
    }
}

/// Area of the unit `n`-sphere S^n.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        4 => 8.0 * PI * PI / 3.0,
        _ => unimplemented!("sphere area beyond S^4 is not needed"),
    }
}

/// A polyhedral cone given by linearly independent inward normals.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalCone {
    normals: Vec<Normal>,
}

impl SphericalCone {
    pub fn new(normals: Vec<Normal>) -> Result<Self, AnalyticError> {
        if normals.len() > MAX_NORMALS {
            return Err(AnalyticError::TooManyNormals { got: normals.len(), max: MAX_NORMALS });
        }
        for n in &normals {
            let sum: Ratio<i64> = n.iter().sum();
            if !sum.is_zero() || n.iter().all(|x| x.is_zero()) {
                return Err(AnalyticError::NotOrthogonal);
            }
        }
        Ok(SphericalCone { normals })
    }

    pub fn from_constraints(cs: &[&Constraint]) -> Result<Self, AnalyticError> {
        SphericalCone::new(cs.iter().map(|c| constraint_normal(c)).collect())
    }

    pub fn normals(&self) -> &[Normal] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn gram(&self) -> Vec<Vec<BigRational>> {
        self.normals.iter().map(|a| self.normals.iter().map(|b| dot(a, b)).collect()).collect()
    }

    /// Interior dihedral angle between facets i and j,
    /// `arccos(-n_i . n_j / (|n_i| |n_j|))`.
    pub fn dihedral_angle(&self, i: usize, j: usize) -> f64 {
        let g = self.gram();
        dihedral(&g, i, j)
    }

    /// Normalized volume for at most three normals.
    pub fn closed_form_volume(&self) -> Result<f64, AnalyticError> {
        let g = self.gram();
        if invert(&g).is_none() {
            return Err(AnalyticError::Degenerate);
        }
        Ok(match self.len() {
            0 => 1.0,
            1 => 0.5,
            2 => dihedral(&g, 0, 1) / (2.0 * PI),
            3 => (dihedral(&g, 0, 1) + dihedral(&g, 0, 2) + dihedral(&g, 1, 2) - PI) / (4.0 * PI),
            k => return Err(AnalyticError::TooManyNormals { got: k, max: 3 }),
        })
    }
}

fn dihedral(g: &[Vec<BigRational>], i: usize, j: usize) -> f64 {
    let s = &g[i][i] * &g[j][j] - &g[i][j] * &g[i][j];
    angle(&s, &-g[i][j].clone())
}

/// Gauss–Jordan inverse; `None` when singular.
fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let k = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let (src, dst) = if r < col {
                    let (lo, hi) = a.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &f * s;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// Volume of the face spanned by the vertices `verts`, from the exact
/// vertex Gram matrix `h`. Points count 1, arcs by length, triangles by
/// angle excess.
fn face_volume(h: &[Vec<BigRational>], verts: &[usize]) -> f64 {
    match verts {
        [_] => 1.0,
        &[p, q] => angle(&(&h[p][p] * &h[q][q] - &h[p][q] * &h[p][q]), &h[p][q]),
        &[a, b, c] => {
            let corner = |p: usize, q: usize, r: usize| {
                // angle at q between the arcs towards p and r
                let n = &h[p][r] * &h[q][q] - &h[q][p] * &h[q][r];
                let ap = &h[p][p] * &h[q][q] - &h[q][p] * &h[q][p];
                let ar = &h[r][r] * &h[q][q] - &h[q][r] * &h[q][r];
                let s = &ap * &ar - &n * &n;
                angle(&s, &n)
            };
            corner(b, a, c) + corner(a, b, c) + corner(a, c, b) - PI
        }
        _ => unimplemented!("faces of dimension above two are not needed"),
    }
}

/// A base cone plus one normal moving along `(1 - t) donor + t target`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedCone {
    pub base: SphericalCone,
    pub donor: usize,
    pub target: Normal,
    /// Upper end of the deformation; 1 reaches `target`.
    pub t: f64,
    /// Normalized volume of `base`; computed recursively when absent.
    pub base_volume: Option<f64>,
}

impl DeformedCone {
    /// Uses the base normal of largest cosine with `target` as donor.
    pub fn new(base: SphericalCone, target: Normal) -> Result<Self, AnalyticError> {
        if base.is_empty() || base.len() >= MAX_NORMALS {
            return Err(AnalyticError::TooManyNormals { got: base.len() + 1, max: MAX_NORMALS });
        }
        SphericalCone::new(vec![target])?;
        let tt = to_f64(&dot(&target, &target));
        let donor = (0..base.len())
            .map(|i| {
                let n = &base.normals[i];
                (i, to_f64(&dot(n, &target)) / (to_f64(&dot(n, n)) * tt).sqrt())
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .unwrap();
        Ok(DeformedCone { base, donor, target, t: 1.0, base_volume: None })
    }

    pub fn with_donor(mut self, donor: usize) -> Self {
        self.donor = donor;
        self
    }

    pub fn with_base_volume(mut self, v: f64) -> Self {
        self.base_volume = Some(v);
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Number of normals including the moving one.
    pub fn len(&self) -> usize {
        self.base.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The moving normal at parameter `t`.
    pub fn normal_at(&self, t: f64) -> Option<[BigRational; 6]> {
        let t = BigRational::from_float(t)?;
        let s = BigRational::one() - &t;
        let d = &self.base.normals[self.donor];
        Some(std::array::from_fn(|j| &s * big(&d[j]) + &t * big(&self.target[j])))
    }
}

/// The exact data of a deformation, precomputed once.
struct Path {
    base_gram: Vec<Vec<BigRational>>,
    /// n_i . donor and n_i . target
    nd: Vec<BigRational>,
    nt: Vec<BigRational>,
    dd: BigRational,
    dt: BigRational,
    tt: BigRational,
}

impl Path {
    fn new(cone: &DeformedCone) -> Self {
        let d = &cone.base.normals[cone.donor];
        Path {
            base_gram: cone.base.gram(),
            nd: cone.base.normals.iter().map(|n| dot(n, d)).collect(),
            nt: cone.base.normals.iter().map(|n| dot(n, &cone.target)).collect(),
            dd: dot(d, d),
            dt: dot(d, &cone.target),
            tt: dot(&cone.target, &cone.target),
        }
    }

    /// Gram matrix with the moving normal last, plus w . w'.
    fn gram_at(&self, t: &BigRational) -> (Vec<Vec<BigRational>>, BigRational) {
        let s = BigRational::one() - t;
        let k = self.base_gram.len();
        let mut g: Vec<Vec<BigRational>> = self.base_gram.clone();
        let col: Vec<BigRational> = (0..k).map(|i| &s * &self.nd[i] + t * &self.nt[i]).collect();
        let ww = &s * &s * &self.dd + BigRational::from_integer(2.into()) * t * &s * &self.dt + t * t * &self.tt;
        for (row, c) in g.iter_mut().zip(&col) {
            row.push(c.clone());
        }
        let mut last = col;
        last.push(ww);
        g.push(last);
        // w' = target - donor
        let wwp = &s * (&self.dt - &self.dd) + t * (&self.tt - &self.dt);
        (g, wwp)
    }

    /// d alpha_{i,m} / dt for base facet i and the moving facet m.
    fn dalpha(&self, g: &[Vec<BigRational>], wwp: &BigRational, i: usize) -> f64 {
        let m = g.len() - 1;
        let c = &g[i][m];
        let cp = &self.nt[i] - &self.nd[i];
        let ww = &g[m][m];
        let d = &g[i][i] * ww - c * c;
        let num = &cp * ww - c * wwp;
        if num.is_zero() {
            return 0.0;
        }
        let r = to_f64(&(&num * &num / (ww * ww * &d))).sqrt();
        if num.is_positive() {
            r
        } else {
            -r
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairIntegral {
    /// Index of the base facet paired with the moving facet.
    pub facet: usize,
    /// `integral of Vol(F) dalpha` over the deformation, unnormalized.
    pub value: f64,
    pub error: f64,
    pub evaluations: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchlafliResult {
    /// Normalized volume at the end of the deformation.
    pub volume: f64,
    pub base_volume: f64,
    pub integrals: Vec<PairIntegral>,
    /// Bound on the normalized volume error from quadrature.
    pub error: f64,
}

/// Integrates Schläfli's differential from the base cone (t = 0) to
/// `cone.t`, with adaptive quadrature at absolute tolerance `quadrature_tol`
/// on each facet-pair integral.
pub fn ic_schlafli_volume(cone: &DeformedCone, quadrature_tol: f64) -> Result<SchlafliResult, AnalyticError> {
    let k = cone.len();
    if k < 3 {
        return Err(AnalyticError::TooManyNormals { got: k, max: MAX_NORMALS });
    }
    if !(0.0..=1.0).contains(&cone.t) {
        return Err(AnalyticError::BadParameter(cone.t));
    }
    let (base_volume, base_error) = match cone.base_volume {
        Some(v) => (v, 0.0),
        None => {
            let b = cone_probability(cone.base.normals(), quadrature_tol)?;
            (b.value, b.error)
        }
    };
    let n = k - 1;
    let omega = sphere_area(n);
    let path = Path::new(cone);
    let mut integrals = Vec::new();
    if cone.t > 0.0 {
        for i in 0..k - 1 {
            let failures = Cell::new(0u32);
            let out = quadrature::integrate(
                |t| match integrand(&path, i, t) {
                    Some(v) => v,
                    None => {
                        if t > 1e-9 {
                            failures.set(failures.get() + 1);
                        }
                        f64::NAN
                    }
                },
                0.0,
                cone.t,
                quadrature_tol,
            );
            if failures.get() > 0 {
                return Err(AnalyticError::Degenerate);
            }
            if !(out.error_estimate <= quadrature_tol) {
                return Err(AnalyticError::Quadrature { achieved: out.error_estimate, target: quadrature_tol });
            }
            integrals.push(PairIntegral {
                facet: i,
                value: out.integral,
                error: out.error_estimate,
                evaluations: out.num_function_evaluations,
            });
        }
    }
    let scale = 1.0 / ((n - 1) as f64 * omega);
    let volume = base_volume + scale * integrals.iter().map(|p| p.value).sum::<f64>();
    let error = base_error + scale * integrals.iter().map(|p| p.error).sum::<f64>();
    Ok(SchlafliResult { volume, base_volume, integrals, error })
}

fn integrand(path: &Path, i: usize, t: f64) -> Option<f64> {
    let tq = BigRational::from_float(t)?;
    let (g, wwp) = path.gram_at(&tq);
    let h = invert(&g)?;
    let m = g.len() - 1;
    let verts: Vec<usize> = (0..g.len()).filter(|&l| l != i && l != m).collect();
    Some(face_volume(&h, &verts) * path.dalpha(&g, &wwp, i))
}

/// Normalized volume with a quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeVolume {
    pub value: f64,
    pub error: f64,
}

/// Closed form up to three normals; otherwise the last normal is added to
/// the cone of the others by Schläfli deformation with the default donor.
pub fn cone_probability(normals: &[Normal], tol: f64) -> Result<ConeVolume, AnalyticError> {
    let cone = SphericalCone::new(normals.to_vec())?;
    if cone.len() <= 3 {
        return Ok(ConeVolume { value: cone.closed_form_volume()?, error: 0.0 });
    }
    let (last, rest) = normals.split_last().unwrap();
    let deformed = DeformedCone::new(SphericalCone::new(rest.to_vec())?, *last)?;
    let r = ic_schlafli_volume(&deformed, tol)?;
    Ok(ConeVolume { value: r.volume, error: r.error })
}

/// Normalized area of the spherical triangle cut out by three normals.
pub fn ic_spherical_triangle(normals: &[Normal; 3]) -> Result<f64, AnalyticError> {
    SphericalCone::new(normals.to_vec())?.closed_form_volume()
}
