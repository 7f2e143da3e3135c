//! Polar spaces in standard coordinates and their collinearity graphs.
//!
//! Coordinates are 0-indexed. The standard forms are
//!
//! * symplectic, dim 2m: `B(x,y) = sum_{i<m} x_i y_{m+i} - x_{m+i} y_i`;
//! * parabolic, dim 2m+1: `Q(x) = x_0^2 + sum_{i=1..m} x_i x_{m+i}`;
//! * hyperbolic, dim 2m: `Q(x) = sum_{i<m} x_i x_{m+i}`;
//! * elliptic, dim 2m: `Q(x) = sum_{i<m-1} x_i x_{m-1+i} + N(x_{2m-2}, x_{2m-1})`
//!   with `N(X,Y) = X^2 + bXY + cY^2` anisotropic;
//! * Hermitian, dim n over GF(q^2): `H(x,y) = sum_i x_i conj(y_{n-1-i})`.
//!
//! Orthogonal families pair points with the polar form
//! `B(u,v) = Q(u+v) - Q(u) - Q(v)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{Elem, Field, FieldError, PrimePower};
use crate::matrix::IntegerMatrix;

/// Largest ambient dimension for which the Witt index is checked by
/// building a maximal totally singular subspace.
const EXHAUSTIVE_WITT_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarFamily {
    S,
    O,
    OMinus,
    OPlus,
    UE,
    UO,
}

impl PolarFamily {
    pub const ALL: [PolarFamily; 6] = [
        PolarFamily::S,
        PolarFamily::O,
        PolarFamily::OMinus,
        PolarFamily::OPlus,
        PolarFamily::UE,
        PolarFamily::UO,
    ];

    /// `2h`, so that half-integral `h` stays integral.
    pub fn two_h(self) -> u32 {
        match self {
            PolarFamily::S | PolarFamily::O => 2,
            PolarFamily::OMinus => 4,
            PolarFamily::OPlus => 0,
            PolarFamily::UE => 1,
            PolarFamily::UO => 3,
        }
    }

    /// Witt index `z`.
    pub fn witt_index(self, m: u32) -> u32 {
        match self {
            PolarFamily::OMinus => m - 1,
            _ => m,
        }
    }

    pub fn dimension(self, m: u32) -> usize {
        match self {
            PolarFamily::O | PolarFamily::UO => 2 * m as usize + 1,
            _ => 2 * m as usize,
        }
    }

    pub fn min_m(self) -> u32 {
        match self {
            PolarFamily::OMinus | PolarFamily::OPlus => 3,
            _ => 2,
        }
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, PolarFamily::UE | PolarFamily::UO)
    }

    pub fn is_orthogonal(self) -> bool {
        matches!(self, PolarFamily::O | PolarFamily::OMinus | PolarFamily::OPlus)
    }

    /// Order of the field the form is defined over.
    pub fn tilde_q(self, q: u64) -> u64 {
        if self.is_hermitian() {
            q * q
        } else {
            q
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PolarFamily::S => "s",
            PolarFamily::O => "o",
            PolarFamily::OMinus => "ominus",
            PolarFamily::OPlus => "oplus",
            PolarFamily::UE => "ue",
            PolarFamily::UO => "uo",
        }
    }

    /// One-letter-ish label used in branch traces.
    pub fn label(self) -> &'static str {
        match self {
            PolarFamily::S => "s",
            PolarFamily::O => "o",
            PolarFamily::OMinus => "o-",
            PolarFamily::OPlus => "o+",
            PolarFamily::UE => "ue",
            PolarFamily::UO => "uo",
        }
    }
}

impl fmt::Display for PolarFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PolarFamily {
    type Err = PolarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolarFamily::ALL
            .into_iter()
            .find(|f| f.tag() == s.to_ascii_lowercase())
            .ok_or_else(|| PolarError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolarError {
    #[error("m = {m} is below the minimum {min} for family {family}")]
    MTooSmall { family: PolarFamily, m: u32, min: u32 },
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("Witt index {found} differs from the expected {expected}")]
    WittIndexMismatch { expected: u32, found: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A normalized projective point: first nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<Elem>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Elem>) -> Self {
        debug_assert!(coords.iter().find(|&&c| c != 0) == Some(&1));
        ProjectivePoint { coords }
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    /// Integer encoding: coordinates as base-`field_size` digits, first
    /// coordinate most significant. Orders points lexicographically.
    pub fn encoding(&self, field_size: u64) -> u128 {
        self.coords.iter().fold(0u128, |acc, &c| acc * field_size as u128 + c as u128)
    }
}

/// A formed vector space in standard coordinates.
#[derive(Debug, Clone)]
pub struct FormSpace {
    family: PolarFamily,
    q: PrimePower,
    m: u32,
    field: Field,
    dim: usize,
    /// Gram matrix of the polar pairing (sesquilinear in the second slot for
    /// Hermitian families).
    gram: Vec<Vec<Elem>>,
    /// `(b, c)` of the anisotropic binary form for the elliptic family.
    anisotropic: Option<(Elem, Elem)>,
}

impl FormSpace {
    pub fn family(&self) -> PolarFamily {
        self.family
    }

    pub fn q(&self) -> PrimePower {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &[Vec<Elem>] {
        &self.gram
    }

    /// Coefficients `(b, c)` of `X^2 + bXY + cY^2` for the elliptic family.
    pub fn anisotropic_part(&self) -> Option<(Elem, Elem)> {
        self.anisotropic
    }

    fn twist(&self, y: Elem) -> Elem {
        if self.family.is_hermitian() {
            self.field.conjugate(y).expect("Hermitian spaces use GF(q^2)")
        } else {
            y
        }
    }

    /// `G * sigma(y)`; pairing with `x` is then a plain dot product.
    pub fn dual_vector(&self, y: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let ty: Vec<Elem> = y.iter().map(|&c| self.twist(c)).collect();
        self.gram
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&ty)
                    .filter(|(&g, &c)| g != 0 && c != 0)
                    .fold(0, |acc, (&g, &c)| f.add(acc, f.mul(g, c)))
            })
            .collect()
    }

    pub fn dot(&self, x: &[Elem], w: &[Elem]) -> Elem {
        let f = &self.field;
        x.iter()
            .zip(w)
            .filter(|(&a, &b)| a != 0 && b != 0)
            .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// The polar pairing of `x` and `y`.
    pub fn pairing(&self, x: &[Elem], y: &[Elem]) -> Elem {
        self.dot(x, &self.dual_vector(y))
    }

    /// The quadratic form, for orthogonal families.
    pub fn quadratic(&self, x: &[Elem]) -> Option<Elem> {
        let f = &self.field;
        let m = self.m as usize;
        let hyp = |pairs: usize, off: usize, shift: usize| {
            (0..pairs).fold(0, |acc, i| f.add(acc, f.mul(x[off + i], x[off + shift + i])))
        };
        match self.family {
            PolarFamily::O => Some(f.add(f.mul(x[0], x[0]), hyp(m, 1, m))),
            PolarFamily::OPlus => Some(hyp(m, 0, m)),
            PolarFamily::OMinus => {
                let (b, c) = self.anisotropic.expect("elliptic form carries its anisotropic part");
                let (u, v) = (x[2 * m - 2], x[2 * m - 1]);
                let n = f.add(f.add(f.mul(u, u), f.mul(b, f.mul(u, v))), f.mul(c, f.mul(v, v)));
                Some(f.add(hyp(m - 1, 0, m - 1), n))
            }
            _ => None,
        }
    }

    /// Whether the 1-space spanned by `x` is singular.
    pub fn is_singular(&self, x: &[Elem]) -> bool {
        match self.family {
            PolarFamily::S => true,
            PolarFamily::UE | PolarFamily::UO => self.pairing(x, x) == 0,
            _ => self.quadratic(x) == Some(0),
        }
    }

    /// Expected number of singular points, `(Q^{z-1+h} + 1) [z]_Q`.
    pub fn expected_point_count(&self) -> u128 {
        let qt = self.family.tilde_q(self.q.value()) as u128;
        let z = self.family.witt_index(self.m);
        let two_h = self.family.two_h();
        // Q^{z-1+h} = q^{2(z-1)+2h} when Q = q^2, else Q^{(2(z-1)+2h)/2}
        let lead = if self.family.is_hermitian() {
            (self.q.value() as u128).pow(2 * (z - 1) + two_h)
        } else {
            qt.pow(z - 1 + two_h / 2)
        };
        let gauss = (qt.pow(z) - 1) / (qt - 1);
        (lead + 1) * gauss
    }

    /// Dimension of a maximal totally singular subspace, found greedily from
    /// the singular points. Every maximal one has the same dimension.
    pub fn maximal_singular_dimension(&self, points: &[ProjectivePoint]) -> u32 {
        let f = &self.field;
        let mut basis: Vec<Vec<Elem>> = Vec::new();
        let mut duals: Vec<Vec<Elem>> = Vec::new();
        let mut span: HashSet<Vec<Elem>> = HashSet::new();
        for p in points {
            let x = p.coords();
            if span.contains(x) {
                continue;
            }
            if duals.iter().any(|w| self.dot(x, w) != 0) {
                continue;
            }
            basis.push(x.to_vec());
            duals.push(self.dual_vector(x));
            span = span_points(f, &basis);
        }
        basis.len() as u32
    }

    /// All normalized singular points, in lexicographic order.
    pub fn singular_points(&self) -> Vec<ProjectivePoint> {
        let size = self.field.size();
        let n = self.dim;
        let mut out = Vec::new();
        let mut x = vec![0 as Elem; n];
        for lead in (0..n).rev() {
            // coordinates before `lead` are zero, `lead` is one
            for c in x.iter_mut() {
                *c = 0;
            }
            x[lead] = 1;
            let tail = n - lead - 1;
            let total = (size as u64).pow(tail as u32);
            for idx in 0..total {
                let mut r = idx;
                for j in (lead + 1..n).rev() {
                    x[j] = (r % size as u64) as Elem;
                    r /= size as u64;
                }
                if self.is_singular(&x) {
                    out.push(ProjectivePoint::new(x.clone()));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Normalized representatives of every point in the span of `basis`.
fn span_points(f: &Field, basis: &[Vec<Elem>]) -> HashSet<Vec<Elem>> {
    let k = basis.len();
    let n = basis[0].len();
    let size = f.size() as u64;
    let mut out = HashSet::new();
    for idx in 1..size.pow(k as u32) {
        let mut r = idx;
        let mut v = vec![0 as Elem; n];
        for b in basis {
            let coef = (r % size) as Elem;
            r /= size;
            if coef != 0 {
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = f.add(*vi, f.mul(coef, bi));
                }
            }
        }
        if let Some(&lead) = v.iter().find(|&&c| c != 0) {
            let inv = f.inv(lead).unwrap();
            out.insert(v.iter().map(|&c| f.mul(c, inv)).collect());
        }
    }
    out
}

/// Anisotropic `X^2 + bXY + cY^2` over GF(q): the smallest `(c, b)` in
/// encoding order, constant term first, with `T^2 + bT + c` rootless.
fn anisotropic_binary(f: &Field) -> (Elem, Elem) {
    for c in f.elements() {
        for b in f.elements() {
            let has_root = f
                .elements()
                .any(|t| f.add(f.add(f.mul(t, t), f.mul(b, t)), c) == 0);
            if !has_root {
                return (b, c);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

fn validate(family: PolarFamily, m: u32) -> Result<(), PolarError> {
    if m < family.min_m() {
        return Err(PolarError::MTooSmall { family, m, min: family.min_m() });
    }
    if m > 64 {
        return Err(PolarError::UnsupportedDimension(format!("m = {m}")));
    }
    Ok(())
}

/// The standard formed space of the family over GF(q) (GF(q^2) for the
/// Hermitian families), without the Witt index check.
pub fn standard_form_unchecked(family: PolarFamily, q: PrimePower, m: u32) -> Result<FormSpace, PolarError> {
    validate(family, m)?;
    let field = if family.is_hermitian() {
        Field::quadratic_extension(q)?
    } else {
        Field::of_order(q)?
    };
    let dim = family.dimension(m);
    let mu = m as usize;
    let one = 1;
    let two = field.from_int(2);
    let minus_one = field.neg(1);
    let mut gram = vec![vec![0 as Elem; dim]; dim];
    let mut anisotropic = None;
    match family {
        PolarFamily::S => {
            for i in 0..mu {
                gram[i][mu + i] = one;
                gram[mu + i][i] = minus_one;
            }
        }
        PolarFamily::O => {
            gram[0][0] = two;
            for i in 1..=mu {
                gram[i][mu + i] = one;
                gram[mu + i][i] = one;
            }
        }
        PolarFamily::OPlus => {
            for i in 0..mu {
                gram[i][mu + i] = one;
                gram[mu + i][i] = one;
            }
        }
        PolarFamily::OMinus => {
            let h = mu - 1;
            for i in 0..h {
                gram[i][h + i] = one;
                gram[h + i][i] = one;
            }
            let (b, c) = anisotropic_binary(&field);
            let (x, y) = (dim - 2, dim - 1);
            gram[x][x] = two;
            gram[x][y] = b;
            gram[y][x] = b;
            gram[y][y] = field.mul(two, c);
            anisotropic = Some((b, c));
        }
        PolarFamily::UE | PolarFamily::UO => {
            for i in 0..dim {
                gram[i][dim - 1 - i] = one;
            }
        }
    }
    Ok(FormSpace { family, q, m, field, dim, gram, anisotropic })
}

/// The standard formed space, with its Witt index verified.
pub fn standard_form(family: PolarFamily, q: PrimePower, m: u32) -> Result<FormSpace, PolarError> {
    let space = standard_form_unchecked(family, q, m)?;
    let points = space.singular_points();
    check_witt_index(&space, &points)?;
    Ok(space)
}

fn check_witt_index(space: &FormSpace, points: &[ProjectivePoint]) -> Result<(), PolarError> {
    let expected = space.family.witt_index(space.m);
    if space.dim <= EXHAUSTIVE_WITT_DIM {
        let found = space.maximal_singular_dimension(points);
        if found != expected {
            return Err(PolarError::WittIndexMismatch { expected, found });
        }
    }
    // (Q^{z-1+h}+1)[z]_Q is strictly increasing in z, so the count pins z down.
    if points.len() as u128 != space.expected_point_count() {
        return Err(PolarError::WittIndexMismatch { expected, found: u32::MAX });
    }
    Ok(())
}

/// All normalized singular points of the space, in lexicographic order.
pub fn enumerate_singular_points(space: &FormSpace) -> Vec<ProjectivePoint> {
    space.singular_points()
}

/// Collinearity graph of a polar space: vertices are singular points,
/// adjacency is orthogonality.
#[derive(Debug, Clone)]
pub struct PolarGraph {
    family: PolarFamily,
    q: PrimePower,
    m: u32,
    field_size: u64,
    vertices: Vec<ProjectivePoint>,
    adjacency: Vec<u8>,
}

impl PolarGraph {
    /// Builds the graph with explicit vertices and adjacency.
    pub fn from_space(space: &FormSpace, vertices: Vec<ProjectivePoint>) -> Self {
        let n = vertices.len();
        let duals: Vec<Vec<Elem>> = vertices.iter().map(|v| space.dual_vector(v.coords())).collect();
        let mut adjacency = vec![0u8; n * n];
        for i in 0..n {
            for j in i + 1..n {
                if space.dot(vertices[j].coords(), &duals[i]) == 0 {
                    adjacency[i * n + j] = 1;
                    adjacency[j * n + i] = 1;
                }
            }
        }
        PolarGraph {
            family: space.family,
            q: space.q,
            m: space.m,
            field_size: space.field.size() as u64,
            vertices,
            adjacency,
        }
    }

    pub fn family(&self) -> PolarFamily {
        self.family
    }

    pub fn q(&self) -> PrimePower {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn field_size(&self) -> u64 {
        self.field_size
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[ProjectivePoint] {
        &self.vertices
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.vertices.len() + j] != 0
    }

    pub fn adjacency_row(&self, i: usize) -> &[u8] {
        let n = self.vertices.len();
        &self.adjacency[i * n..(i + 1) * n]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .map(|i| self.adjacency_row(i).iter().filter(|&&a| a != 0).count())
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && self.adjacent(i, j) {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    }

    pub fn adjacency_matrix(&self) -> IntegerMatrix {
        let n = self.vertex_count();
        IntegerMatrix::from_flat(n, n, self.adjacency.iter().map(|&a| a as i64).collect())
    }

    /// `L = D - A`.
    pub fn laplacian_matrix(&self) -> IntegerMatrix {
        let n = self.vertex_count();
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            let mut deg = 0;
            for j in 0..n {
                if self.adjacent(i, j) {
                    m.set(i, j, -1);
                    deg += 1;
                }
            }
            m.set(i, i, deg);
        }
        m
    }

    /// Flips the edge `{i, j}`; for perturbation tests.
    pub fn toggle_edge(&mut self, i: usize, j: usize) {
        assert_ne!(i, j);
        let n = self.vertex_count();
        self.adjacency[i * n + j] ^= 1;
        self.adjacency[j * n + i] ^= 1;
    }

    /// Tab-separated point list, one line per vertex.
    pub fn points_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let line: Vec<String> = v.coords().iter().map(|c| c.to_string()).collect();
            s.push_str(&line.join("\t"));
            s.push('\n');
        }
        s
    }
}

/// Constructs the polar graph of the family.
pub fn build_graph(family: PolarFamily, q: PrimePower, m: u32) -> Result<PolarGraph, PolarError> {
    let space = standard_form_unchecked(family, q, m)?;
    let points = space.singular_points();
    check_witt_index(&space, &points)?;
    Ok(PolarGraph::from_space(&space, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(q: u64) -> PrimePower {
        PrimePower::from_value(q).unwrap()
    }

    #[test]
    fn symplectic_gram() {
        let s = standard_form(PolarFamily::S, pp(2), 2).unwrap();
        let expect = vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        assert_eq!(s.gram(), expect.as_slice());
    }

    #[test]
    fn elliptic_over_gf2() {
        let s = standard_form(PolarFamily::OMinus, pp(2), 3).unwrap();
        assert_eq!(s.anisotropic_part(), Some((1, 1)));
        // x1x3 + x2x4 + x5^2 + x5x6 + x6^2 in 1-indexed coordinates
        assert_eq!(s.quadratic(&[1, 0, 1, 0, 0, 0]), Some(1));
        assert_eq!(s.quadratic(&[0, 0, 0, 0, 1, 1]), Some(1));
        assert_eq!(s.quadratic(&[0, 0, 0, 0, 1, 0]), Some(1));
        assert_eq!(s.maximal_singular_dimension(&s.singular_points()), 2);
    }

    #[test]
    fn hyperbolic_witt_index() {
        let s = standard_form(PolarFamily::OPlus, pp(2), 3).unwrap();
        assert_eq!(s.maximal_singular_dimension(&s.singular_points()), 3);
    }

    #[test]
    fn point_counts() {
        let cases = [
            (PolarFamily::S, 2, 2, 15),
            (PolarFamily::S, 3, 2, 40),
            (PolarFamily::O, 3, 2, 40),
            (PolarFamily::O, 2, 2, 15),
            (PolarFamily::OMinus, 2, 3, 27),
            (PolarFamily::OPlus, 2, 3, 35),
            (PolarFamily::UE, 2, 2, 45),
            (PolarFamily::UO, 2, 2, 165),
        ];
        for (fam, q, m, n) in cases {
            let g = build_graph(fam, pp(q), m).unwrap();
            assert_eq!(g.vertex_count(), n, "{fam} {q} {m}");
        }
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            standard_form(PolarFamily::OPlus, pp(2), 2),
            Err(PolarError::MTooSmall { .. })
        ));
    }

    #[test]
    fn points_are_normalized_and_sorted() {
        let g = build_graph(PolarFamily::UE, pp(2), 2).unwrap();
        for w in g.vertices().windows(2) {
            assert!(w[0].encoding(4) < w[1].encoding(4));
        }
        for v in g.vertices() {
            assert_eq!(v.coords().iter().find(|&&c| c != 0), Some(&1));
        }
    }

    #[test]
    fn family_tags_round_trip() {
        for f in PolarFamily::ALL {
            assert_eq!(f.tag().parse::<PolarFamily>().unwrap(), f);
        }
        assert!("x".parse::<PolarFamily>().is_err());
    }
}
