//! Numerical data of the affine Dynkin diagrams: Cartan matrices, marks and
//! comarks, the invariant bilinear form, weights and roots, the `cl`
//! projection onto level-zero classical weights, and classification of
//! positive roots.
//!
//! Conventions: node 0 is the affine node, `I_0 = {1, ..., n}` generates the
//! classical subsystem, and for `A_{2n}^(2)` the numbering is reversed so
//! that `(alpha_0, alpha_0) = 4` (hence `a_0 = 1`, `a_0^vee = 2`).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        };
        write!(f, "{c}")
    }
}

/// A diagram `X_N^(r)` from the affine tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AffineType {
    pub family: Family,
    /// The subscript N in `X_N^(r)`.
    pub n: usize,
    /// The twist r.
    pub twist: u8,
}

impl AffineType {
    pub fn new(family: Family, n: usize, twist: u8) -> Result<Self> {
        let t = AffineType { family, n, twist };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let ok = match (self.family, self.twist) {
            (Family::A, 1) => self.n >= 1,
            (Family::B, 1) => self.n >= 3,
            (Family::C, 1) => self.n >= 2,
            (Family::D, 1) => self.n >= 4,
            (Family::E, 1) => matches!(self.n, 6 | 7 | 8),
            (Family::F, 1) => self.n == 4,
            (Family::G, 1) => self.n == 2,
            // A_{2n}^(2) for n >= 1 and A_{2n-1}^(2) for n >= 3.
            (Family::A, 2) => self.n == 2 || self.n >= 4,
            // D_{n+1}^(2) for n >= 2.
            (Family::D, 2) => self.n >= 3,
            (Family::E, 2) => self.n == 6,
            (Family::D, 3) => self.n == 4,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("{self} is not an affine table entry")))
        }
    }

    /// Number of classical nodes (size of `I_0`).
    pub fn rank(&self) -> usize {
        match (self.family, self.twist) {
            (Family::A, 2) => self.n.div_ceil(2),
            (Family::D, 2) => self.n - 1,
            (Family::E, 2) => 4,
            (Family::D, 3) => 2,
            _ => self.n,
        }
    }

    /// Shell-safe spelling `X<N>~<r>`, e.g. `A2~2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = match chars.next() {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(Error::parse(format!("bad type spelling {s:?}"))),
        };
        let rest: String = chars.collect();
        let (num, twist) = match rest.split_once('~') {
            Some((a, b)) => (a, b),
            None => (rest.as_str(), "1"),
        };
        let n: usize = num.parse().map_err(|_| Error::parse(format!("bad rank in {s:?}")))?;
        let twist: u8 = twist.parse().map_err(|_| Error::parse(format!("bad twist in {s:?}")))?;
        AffineType::new(fam, n, twist)
    }

    /// All valid table entries with classical rank at most `max_rank`.
    pub fn all_up_to_rank(max_rank: usize) -> Vec<AffineType> {
        let mut out = Vec::new();
        let mut push = |f, n, t| {
            if let Ok(typ) = AffineType::new(f, n, t) {
                if typ.rank() <= max_rank {
                    out.push(typ);
                }
            }
        };
        for n in 1..=max_rank {
            push(Family::A, n, 1);
        }
        for n in 3..=max_rank {
            push(Family::B, n, 1);
        }
        for n in 2..=max_rank {
            push(Family::C, n, 1);
        }
        for n in 4..=max_rank {
            push(Family::D, n, 1);
        }
        for n in [6, 7, 8] {
            push(Family::E, n, 1);
        }
        push(Family::F, 4, 1);
        push(Family::G, 2, 1);
        for n in 1..=max_rank {
            push(Family::A, 2 * n, 2); // A_{2n}^(2)
        }
        for n in 3..=max_rank {
            push(Family::A, 2 * n - 1, 2); // A_{2n-1}^(2)
        }
        for n in 2..=max_rank {
            push(Family::D, n + 1, 2); // D_{n+1}^(2)
        }
        push(Family::E, 6, 2);
        push(Family::D, 4, 3);
        out
    }
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}~{}", self.family, self.n, self.twist)
    }
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn big_rational_from(n: i64) -> BigRational {
    big(n)
}

/// All numerical data of one affine diagram.
#[derive(Debug)]
pub struct RootDatum {
    pub typ: AffineType,
    /// Classical rank n; nodes are `0..=n`.
    pub rank: usize,
    /// Cartan matrix `a_ij = <h_i, alpha_j>`.
    pub cartan: Vec<Vec<i64>>,
    /// Marks `a_i` (coefficients of delta).
    pub marks: Vec<i64>,
    /// Comarks `a_i^vee` (coefficients of the canonical central element).
    pub comarks: Vec<i64>,
    /// Invariant form `(alpha_i, alpha_j) = a_i^vee a_i^{-1} a_ij`.
    pub gram: Vec<Vec<BigRational>>,
    /// Smallest positive integer with `d (alpha_i, alpha_i)/2` integral.
    pub d: i64,
    /// `d_i = max(1, (alpha_i,alpha_i)/2)` for every node.
    pub d_node: Vec<BigRational>,
    pub coxeter: i64,
    pub dual_coxeter: i64,
    /// `cl(varpi_i) = kappa_i omega_i^vee` on `I_0` (1-based node -> index 0).
    kappa: Vec<BigRational>,
    /// `(omega_i^vee, omega_j^vee)`: inverse of the classical Gram matrix.
    gram_cl_inv: Vec<Vec<BigRational>>,
    /// Classical positive roots in `cl(alpha_j)` coordinates (`I_0`-indexed).
    finite_pos_roots: Vec<Vec<i64>>,
}

/// Edge list entry: `(i, j, a_ij, a_ji)`.
type Edge = (usize, usize, i64, i64);

fn diagram_tables(typ: AffineType) -> (Vec<Edge>, Vec<i64>, Vec<i64>) {
    use Family::*;
    let n = typ.rank();
    let chain = |lo: usize, hi: usize| -> Vec<Edge> {
        (lo..hi).map(|i| (i, i + 1, -1, -1)).collect()
    };
    match (typ.family, typ.twist) {
        (A, 1) if n == 1 => (vec![(0, 1, -2, -2)], vec![1, 1], vec![1, 1]),
        (A, 1) => {
            let mut e = chain(0, n);
            e.push((n, 0, -1, -1));
            (e, vec![1; n + 1], vec![1; n + 1])
        }
        (B, 1) => {
            let mut e = vec![(0, 2, -1, -1), (1, 2, -1, -1)];
            e.extend(chain(2, n - 1));
            e.push((n - 1, n, -1, -2));
            let mut marks = vec![2; n + 1];
            marks[0] = 1;
            marks[1] = 1;
            let mut comarks = marks.clone();
            comarks[n] = 1;
            (e, marks, comarks)
        }
        (C, 1) => {
            let mut e = vec![(0, 1, -1, -2)];
            e.extend(chain(1, n - 1));
            e.push((n - 1, n, -2, -1));
            let mut marks = vec![2; n + 1];
            marks[0] = 1;
            marks[n] = 1;
            (e, marks, vec![1; n + 1])
        }
        (D, 1) => {
            let mut e = vec![(0, 2, -1, -1), (1, 2, -1, -1)];
            e.extend(chain(2, n - 2));
            e.push((n - 2, n - 1, -1, -1));
            e.push((n - 2, n, -1, -1));
            let mut marks = vec![2; n + 1];
            marks[0] = 1;
            marks[1] = 1;
            marks[n - 1] = 1;
            marks[n] = 1;
            (e, marks.clone(), marks)
        }
        (E, 1) => {
            let (mut e, marks): (Vec<Edge>, Vec<i64>) = match n {
                6 => (
                    vec![(1, 3, -1, -1), (3, 4, -1, -1), (4, 5, -1, -1), (5, 6, -1, -1), (2, 4, -1, -1), (0, 2, -1, -1)],
                    vec![1, 1, 2, 2, 3, 2, 1],
                ),
                7 => (
                    vec![
                        (1, 3, -1, -1),
                        (3, 4, -1, -1),
                        (4, 5, -1, -1),
                        (5, 6, -1, -1),
                        (6, 7, -1, -1),
                        (2, 4, -1, -1),
                        (0, 1, -1, -1),
                    ],
                    vec![1, 2, 2, 3, 4, 3, 2, 1],
                ),
                8 => (
                    vec![
                        (1, 3, -1, -1),
                        (3, 4, -1, -1),
                        (4, 5, -1, -1),
                        (5, 6, -1, -1),
                        (6, 7, -1, -1),
                        (7, 8, -1, -1),
                        (2, 4, -1, -1),
                        (0, 8, -1, -1),
                    ],
                    vec![1, 2, 3, 4, 6, 5, 4, 3, 2],
                ),
                _ => unreachable!(),
            };
            e.sort();
            (e, marks.clone(), marks)
        }
        (F, 1) => (
            vec![(0, 1, -1, -1), (1, 2, -1, -1), (2, 3, -1, -2), (3, 4, -1, -1)],
            vec![1, 2, 3, 4, 2],
            vec![1, 2, 3, 2, 1],
        ),
        (G, 1) => (
            vec![(0, 1, -1, -1), (1, 2, -1, -3)],
            vec![1, 2, 3],
            vec![1, 2, 1],
        ),
        // A_{2n}^(2), reversed numbering: (alpha_0, alpha_0) = 4, alpha_n short.
        (A, 2) if typ.n % 2 == 0 => {
            if n == 1 {
                (vec![(0, 1, -1, -4)], vec![1, 2], vec![2, 1])
            } else {
                let mut e = vec![(0, 1, -1, -2)];
                e.extend(chain(1, n - 1));
                e.push((n - 1, n, -1, -2));
                let mut marks = vec![2; n + 1];
                marks[0] = 1;
                let mut comarks = vec![2; n + 1];
                comarks[n] = 1;
                (e, marks, comarks)
            }
        }
        // A_{2n-1}^(2): transpose of B_n^(1).
        (A, 2) => {
            let mut e = vec![(0, 2, -1, -1), (1, 2, -1, -1)];
            e.extend(chain(2, n - 1));
            e.push((n - 1, n, -2, -1));
            let mut marks = vec![2; n + 1];
            marks[0] = 1;
            marks[1] = 1;
            marks[n] = 1;
            let mut comarks = vec![2; n + 1];
            comarks[0] = 1;
            comarks[1] = 1;
            (e, marks, comarks)
        }
        // D_{n+1}^(2): transpose of C_n^(1).
        (D, 2) => {
            let mut e = vec![(0, 1, -2, -1)];
            e.extend(chain(1, n - 1));
            e.push((n - 1, n, -1, -2));
            let mut comarks = vec![2; n + 1];
            comarks[0] = 1;
            comarks[n] = 1;
            (e, vec![1; n + 1], comarks)
        }
        // E_6^(2): transpose of F_4^(1).
        (E, 2) => (
            vec![(0, 1, -1, -1), (1, 2, -1, -1), (2, 3, -2, -1), (3, 4, -1, -1)],
            vec![1, 2, 3, 2, 1],
            vec![1, 2, 3, 4, 2],
        ),
        // D_4^(3): transpose of G_2^(1).
        (D, 3) => (
            vec![(0, 1, -1, -1), (1, 2, -3, -1)],
            vec![1, 2, 1],
            vec![1, 2, 3],
        ),
        _ => unreachable!("validated type"),
    }
}

/// Build the full root datum of an affine table entry. All structural
/// invariants are checked at construction.
pub fn build_root_datum(typ: AffineType) -> Result<Arc<RootDatum>> {
    typ.validate()?;
    let n = typ.rank();
    let (edges, marks, comarks) = diagram_tables(typ);
    let mut cartan = vec![vec![0i64; n + 1]; n + 1];
    for i in 0..=n {
        cartan[i][i] = 2;
    }
    for (i, j, aij, aji) in edges {
        cartan[i][j] = aij;
        cartan[j][i] = aji;
    }

    // gram_ij = a_i^vee a_i^{-1} a_ij.
    let gram: Vec<Vec<BigRational>> = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| &(&big(comarks[i]) / &big(marks[i])) * &big(cartan[i][j]))
                .collect()
        })
        .collect();

    // Structural checks.
    for i in 0..=n {
        if cartan[i][i] != 2 {
            return Err(Error::domain("diagonal of Cartan matrix must be 2"));
        }
        for j in 0..=n {
            if i != j && cartan[i][j] > 0 {
                return Err(Error::domain("off-diagonal Cartan entries must be <= 0"));
            }
            if (cartan[i][j] == 0) != (cartan[j][i] == 0) {
                return Err(Error::domain("Cartan zero pattern must be symmetric"));
            }
            if gram[i][j] != gram[j][i] {
                return Err(Error::domain("invariant form must be symmetric"));
            }
        }
        // delta is null: sum_j a_j gram_ij = 0.
        let mut s = BigRational::zero();
        for j in 0..=n {
            s += &gram[i][j] * &big(marks[j]);
        }
        if !s.is_zero() {
            return Err(Error::domain("marks must span the null direction"));
        }
        // c is central: sum_i a_i^vee a_ij = 0.
        let mut t = 0i64;
        for k in 0..=n {
            t += comarks[k] * cartan[k][i];
        }
        if t != 0 {
            return Err(Error::domain("comarks must span the center"));
        }
    }

    // d: smallest positive integer with d gram_ii / 2 integral for all i.
    let mut d = 1i64;
    loop {
        if (0..=n).all(|i| (&gram[i][i] * &big(d) / &big(2)).is_integer()) {
            break;
        }
        d += 1;
        assert!(d <= 12, "denominator search escaped the affine tables");
    }

    let d_node: Vec<BigRational> = (0..=n)
        .map(|i| {
            let half = &gram[i][i] / &big(2);
            if half > BigRational::one() {
                half
            } else {
                BigRational::one()
            }
        })
        .collect();

    let coxeter: i64 = marks.iter().sum();
    let dual_coxeter: i64 = comarks.iter().sum();

    // kappa_i = (alpha_i, alpha_i)/2 * <h_i, varpi_i>; the pairing is 1
    // except at node n of A_{2n}^(2) where varpi_n = 2 Lambda_n - Lambda_0.
    let is_a2n2 = typ.family == Family::A && typ.twist == 2 && typ.n % 2 == 0;
    let kappa: Vec<BigRational> = (1..=n)
        .map(|i| {
            let pair = if is_a2n2 && i == n { big(2) } else { big(1) };
            &(&gram[i][i] / &big(2)) * &pair
        })
        .collect();

    // Classical Gram matrix on I_0 and its inverse.
    let gcl: Vec<Vec<BigRational>> = (1..=n).map(|i| (1..=n).map(|j| gram[i][j].clone()).collect()).collect();
    let gram_cl_inv = invert_matrix(&gcl).ok_or_else(|| Error::domain("classical form must be nondegenerate"))?;
    // Positive definiteness via leading principal minors.
    for k in 1..=n {
        let sub: Vec<Vec<BigRational>> = (0..k).map(|i| (0..k).map(|j| gcl[i][j].clone()).collect()).collect();
        if determinant(&sub) <= BigRational::zero() {
            return Err(Error::domain("classical form must be positive definite"));
        }
    }

    let mut datum = RootDatum {
        typ,
        rank: n,
        cartan,
        marks,
        comarks,
        gram,
        d,
        d_node,
        coxeter,
        dual_coxeter,
        kappa,
        gram_cl_inv,
        finite_pos_roots: Vec::new(),
    };
    datum.finite_pos_roots = datum.compute_finite_positive_roots();
    Ok(Arc::new(datum))
}

fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else { return BigRational::zero() };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            let factor = &a[r][col] / &pv;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}

pub(crate) fn invert_matrix(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let pv = a[col][col].clone();
        for c in 0..n {
            a[col][c] /= pv.clone();
            inv[col][c] /= pv.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let t1 = &f * &a[col][c];
                    a[r][c] -= t1;
                    let t2 = &f * &inv[col][c];
                    inv[r][c] -= t2;
                }
            }
        }
    }
    Some(inv)
}

/// Element of the weight lattice, stored by its coroot pairings and the
/// scaling coordinate `<d, lambda>` (rational so that translation images
/// stay representable).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub coords: Vec<i64>,
    pub delta_coord: BigRational,
}

impl Weight {
    pub fn new(coords: Vec<i64>, delta_coord: BigRational) -> Self {
        Weight { coords, delta_coord }
    }

    pub fn zero(rank: usize) -> Self {
        Weight::new(vec![0; rank + 1], BigRational::zero())
    }

    /// Fundamental weight `Lambda_i`.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut coords = vec![0; rank + 1];
        coords[i] = 1;
        Weight::new(coords, BigRational::zero())
    }

    /// Level `sum a_i^vee <h_i, lambda>`; derived, never stored.
    pub fn level(&self, datum: &RootDatum) -> i64 {
        self.coords.iter().zip(&datum.comarks).map(|(m, a)| m * a).sum()
    }

    /// Level-zero fundamental weight `varpi_i` for `i` in `I_0`.
    pub fn level_zero_fundamental(datum: &RootDatum, i: usize) -> Self {
        assert!((1..=datum.rank).contains(&i));
        let is_a2n2 =
            datum.typ.family == Family::A && datum.typ.twist == 2 && datum.typ.n % 2 == 0;
        let mut coords = vec![0i64; datum.rank + 1];
        if is_a2n2 && i == datum.rank {
            coords[i] = 2;
            coords[0] = -1;
        } else {
            coords[i] = 1;
            coords[0] = -datum.comarks[i];
        }
        Weight::new(coords, BigRational::zero())
    }
}

/// Element of the root lattice in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub coords: Vec<i64>,
}

impl Root {
    pub fn new(coords: Vec<i64>) -> Self {
        Root { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Root::new(vec![0; rank + 1])
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut coords = vec![0; rank + 1];
        coords[i] = 1;
        Root::new(coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    pub fn height(&self) -> i64 {
        self.coords.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.coords.iter().all(|c| *c >= 0)
    }

    pub fn is_negative(&self) -> bool {
        !self.is_zero() && self.coords.iter().all(|c| *c <= 0)
    }

    pub fn add(&self, other: &Root) -> Root {
        Root::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Root) -> Root {
        Root::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Root {
        Root::new(self.coords.iter().map(|c| -c).collect())
    }

    pub fn scaled(&self, k: i64) -> Root {
        Root::new(self.coords.iter().map(|c| c * k).collect())
    }

    /// Nonzero integer `k` with `self = k delta`, if any.
    pub fn delta_multiple(&self, datum: &RootDatum) -> Option<i64> {
        let k = self.coords[0] / datum.marks[0];
        if k != 0 && self.coords == datum.delta().scaled(k).coords {
            Some(k)
        } else {
            None
        }
    }

    /// Coefficient of delta when the classical part is reduced mod delta
    /// (the affine node always has mark 1 in our conventions).
    pub fn delta_degree(&self, datum: &RootDatum) -> i64 {
        debug_assert_eq!(datum.marks[0], 1);
        self.coords[0]
    }

    /// Coordinates of `cl(root)` over `cl(alpha_j)`, `j` in `I_0`.
    pub fn classical_part(&self, datum: &RootDatum) -> Vec<i64> {
        let m = self.delta_degree(datum);
        (1..=datum.rank).map(|j| self.coords[j] - m * datum.marks[j]).collect()
    }
}

/// Classification tag of a positive root.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PositiveRoot {
    /// Real with classical part in the positive classical cone.
    ClassicalPlus(Vec<i64>),
    /// Real with classical part in the negative classical cone.
    ClassicalMinus(Vec<i64>),
    /// Imaginary with multiplicity slot: `(m delta, i)`, `d_i | m`.
    Imaginary { m: i64, node: usize },
}

/// Level-zero classical weight, in coordinates over the basis
/// `cl(varpi_i)`, `i` in `I_0`. Coordinates are exact rationals; every value
/// arising in the integral tests is integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClWeight {
    pub coords: Vec<BigRational>,
}

impl ClWeight {
    pub fn zero(rank: usize) -> Self {
        ClWeight { coords: vec![BigRational::zero(); rank] }
    }

    pub fn from_ints(coords: Vec<i64>) -> Self {
        ClWeight { coords: coords.into_iter().map(big).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &ClWeight) -> ClWeight {
        ClWeight { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &ClWeight) -> ClWeight {
        ClWeight { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> ClWeight {
        ClWeight { coords: self.coords.iter().map(|c| -c.clone()).collect() }
    }

    pub fn scaled(&self, k: &BigRational) -> ClWeight {
        ClWeight { coords: self.coords.iter().map(|c| c * k).collect() }
    }

    pub fn as_ints(&self) -> Option<Vec<i64>> {
        self.coords
            .iter()
            .map(|c| {
                if c.is_integer() {
                    c.to_integer().try_into().ok()
                } else {
                    None
                }
            })
            .collect()
    }
}

impl RootDatum {
    pub fn delta(&self) -> Root {
        Root::new(self.marks.clone())
    }

    /// Ratio `q_i = q_s^{exp}`: the integer `d (alpha_i, alpha_i) / 2`.
    pub fn q_exp(&self, i: usize) -> i64 {
        let e = &self.gram[i][i] * &big(self.d) / &big(2);
        assert!(e.is_integer());
        let v: BigInt = e.to_integer();
        i64::try_from(v).expect("q exponent fits i64")
    }

    /// Integer grid exponent of `q_s` for a form value `(x, y)` given the
    /// exact rational `(x, y)`: returns `d * value`, checked integral.
    pub fn qs_exp(&self, value: &BigRational) -> i64 {
        let e = value * &big(self.d);
        assert!(e.is_integer(), "pairing off the q_s grid");
        i64::try_from(e.to_integer()).expect("exponent fits i64")
    }

    /// Pairing `(root, root)` under the invariant form.
    pub fn root_pair(&self, a: &Root, b: &Root) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..=self.rank {
            if a.coords[i] == 0 {
                continue;
            }
            for j in 0..=self.rank {
                if b.coords[j] != 0 {
                    s += &(&big(a.coords[i]) * &big(b.coords[j])) * &self.gram[i][j];
                }
            }
        }
        s
    }

    /// `<h_i, root>` (Cartan pairing).
    pub fn coroot_pair_root(&self, i: usize, r: &Root) -> i64 {
        (0..=self.rank).map(|j| self.cartan[i][j] * r.coords[j]).sum()
    }

    /// Simple reflection `s_i` on a root.
    pub fn reflect_root(&self, i: usize, r: &Root) -> Root {
        let c = self.coroot_pair_root(i, r);
        let mut out = r.clone();
        out.coords[i] -= c;
        out
    }

    /// Simple reflection `s_i` on a weight.
    pub fn reflect_weight(&self, i: usize, w: &Weight) -> Weight {
        let c = w.coords[i];
        let mut coords = w.coords.clone();
        for j in 0..=self.rank {
            coords[j] -= c * self.cartan[j][i];
        }
        let mut delta = w.delta_coord.clone();
        if i == 0 {
            delta -= big(c);
        }
        Weight::new(coords, delta)
    }

    /// Coordinates of a weight over the basis `alpha_0..alpha_n, Lambda_0`,
    /// used to evaluate the invariant form on arbitrary weights.
    pub fn weight_alpha_coords(&self, w: &Weight) -> (Vec<BigRational>, BigRational) {
        let coords: Vec<BigRational> = w.coords.iter().map(|c| big(*c)).collect();
        self.weight_alpha_coords_q(&coords, &w.delta_coord)
    }

    /// Rational-coordinate version of [`Self::weight_alpha_coords`].
    pub fn weight_alpha_coords_q(
        &self,
        coords: &[BigRational],
        delta_coord: &BigRational,
    ) -> (Vec<BigRational>, BigRational) {
        let n = self.rank;
        let mut level = BigRational::zero();
        for (m, a) in coords.iter().zip(&self.comarks) {
            level += m * &big(*a);
        }
        let l0 = &level / &big(self.comarks[0]);
        let y0 = delta_coord.clone();
        // Solve sum_{i in I_0} a_{ji} y_i = m_j - a_{j0} y0 for j in I_0.
        let rhs: Vec<BigRational> = (1..=n).map(|j| &coords[j] - &(&big(self.cartan[j][0]) * &y0)).collect();
        let mat: Vec<Vec<BigRational>> = (1..=n).map(|j| (1..=n).map(|i| big(self.cartan[j][i])).collect()).collect();
        let inv = invert_matrix(&mat).expect("classical Cartan matrix invertible");
        let mut y = vec![y0.clone()];
        for row in &inv {
            let mut s = BigRational::zero();
            for (c, r) in row.iter().zip(&rhs) {
                s += c * r;
            }
            y.push(s);
        }
        // Row 0 consistency follows from centrality of c.
        debug_assert_eq!(
            {
                let mut s = l0.clone();
                for i in 0..=n {
                    s += &big(self.cartan[0][i]) * &y[i];
                }
                s
            },
            coords[0].clone()
        );
        (y, l0)
    }

    /// Invariant form on weights, with the standard `(Lambda_0, Lambda_0) = 0`
    /// normalization of the free direction.
    pub fn weight_pair(&self, a: &Weight, b: &Weight) -> BigRational {
        let (ya, la) = self.weight_alpha_coords(a);
        let (yb, lb) = self.weight_alpha_coords(b);
        let mut s = BigRational::zero();
        for i in 0..=self.rank {
            if ya[i].is_zero() {
                continue;
            }
            for j in 0..=self.rank {
                if !yb[j].is_zero() {
                    s += &(&ya[i] * &yb[j]) * &self.gram[i][j];
                }
            }
        }
        // (alpha_i, Lambda_0) = delta_{i0} (alpha_0, alpha_0) / 2.
        let half00 = &self.gram[0][0] / &big(2);
        s += &(&ya[0] * &lb) * &half00;
        s += &(&yb[0] * &la) * &half00;
        s
    }

    /// Pairing `(root, weight)`.
    pub fn root_weight_pair(&self, r: &Root, w: &Weight) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..=self.rank {
            if r.coords[i] != 0 {
                s += &(&big(r.coords[i]) * &(&self.gram[i][i] / &big(2))) * &big(w.coords[i]);
            }
        }
        s
    }

    /// Real-root membership test by reflection descent: descend with simple
    /// reflections that strictly decrease height until a simple root or a
    /// contradiction is reached. Rejects the zero root.
    pub fn is_real_root(&self, r: &Root) -> Result<bool> {
        if r.is_zero() {
            return Err(Error::domain("zero root has no realness classification"));
        }
        if r.delta_multiple(self).is_some() {
            return Ok(false);
        }
        let mut cur = if r.is_negative() { r.neg() } else { r.clone() };
        if !cur.is_positive() {
            return Ok(false); // mixed signs: not a root at all
        }
        loop {
            if (0..=self.rank).any(|i| cur == Root::simple(self.rank, i)) {
                return Ok(true);
            }
            // Find a descent: (cur, alpha_i) > 0.
            let mut descended = false;
            for i in 0..=self.rank {
                if self.coroot_pair_root(i, &cur) > 0 {
                    let next = self.reflect_root(i, &cur);
                    if !next.is_positive() {
                        // Only possible if cur was simple, handled above.
                        return Ok(false);
                    }
                    cur = next;
                    descended = true;
                    break;
                }
            }
            if !descended {
                return Ok(false);
            }
        }
    }

    /// `d_alpha = max(1, (alpha, alpha)/2)` for a real root.
    pub fn d_alpha(&self, r: &Root) -> Result<BigRational> {
        if !self.is_real_root(r)? {
            return Err(Error::domain("d_alpha is defined for real roots only"));
        }
        let half = &self.root_pair(r, r) / &big(2);
        Ok(if half > BigRational::one() { half } else { BigRational::one() })
    }

    fn compute_finite_positive_roots(&self) -> Vec<Vec<i64>> {
        // Closure of the classical simple roots under I_0 reflections,
        // keeping positives. Coordinates over cl(alpha_j).
        let n = self.rank;
        let mut set: std::collections::BTreeSet<Vec<i64>> = (0..n)
            .map(|j| {
                let mut v = vec![0i64; n];
                v[j] = 1;
                v
            })
            .collect();
        loop {
            let mut added = false;
            let snapshot: Vec<Vec<i64>> = set.iter().cloned().collect();
            for b in snapshot {
                for j in 1..=n {
                    let pair: i64 = (1..=n).map(|l| self.cartan[j][l] * b[l - 1]).sum();
                    let mut img = b.clone();
                    img[j - 1] -= pair;
                    if img.iter().all(|c| *c >= 0) && img.iter().any(|c| *c > 0) && set.insert(img) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        set.into_iter().collect()
    }

    pub fn finite_positive_roots(&self) -> &[Vec<i64>] {
        &self.finite_pos_roots
    }

    /// Every positive root with delta-coefficient at most `cutoff`,
    /// classified into the classical-plus, classical-minus, and imaginary
    /// families. Counts are exact (imaginary roots carry their `I_0`
    /// multiplicity slots).
    pub fn enumerate_positive_roots(&self, cutoff: i64) -> Vec<PositiveRoot> {
        assert!(cutoff >= 0);
        let n = self.rank;
        let mut out = Vec::new();
        // Candidate classical parts: +-(finite positive roots) and their
        // doubles (the doubles only survive the realness test in A_{2n}^(2)).
        let mut parts: Vec<(Vec<i64>, bool)> = Vec::new();
        for b in &self.finite_pos_roots {
            parts.push((b.clone(), true));
            parts.push((b.iter().map(|c| -c).collect(), false));
            parts.push((b.iter().map(|c| 2 * c).collect(), true));
            parts.push((b.iter().map(|c| -2 * c).collect(), false));
        }
        for m in 0..=cutoff {
            for (b, plus) in &parts {
                let mut coords = vec![0i64; n + 1];
                coords[0] = m * self.marks[0];
                for j in 1..=n {
                    coords[j] = b[j - 1] + m * self.marks[j];
                }
                let r = Root::new(coords);
                if !r.is_positive() {
                    continue;
                }
                if self.is_real_root(&r).unwrap_or(false) {
                    if *plus {
                        out.push(PositiveRoot::ClassicalPlus(r.coords));
                    } else {
                        out.push(PositiveRoot::ClassicalMinus(r.coords));
                    }
                }
            }
            if m > 0 {
                for i in 1..=n {
                    let quot = &big(m) / &self.d_node[i];
                    if quot.is_integer() {
                        out.push(PositiveRoot::Imaginary { m, node: i });
                    }
                }
            }
        }
        out
    }

    /// `cl` projection onto the level-zero classical weight space, killing
    /// both the delta and the level directions.
    pub fn cl_project(&self, w: &Weight) -> ClWeight {
        let coords: Vec<BigRational> = w.coords.iter().map(|c| big(*c)).collect();
        self.cl_project_q(&WeightQ { coords, delta_coord: w.delta_coord.clone() })
    }

    /// Rational-coordinate version of [`Self::cl_project`].
    pub fn cl_project_q(&self, w: &WeightQ) -> ClWeight {
        let is_a2n2 = self.typ.family == Family::A && self.typ.twist == 2 && self.typ.n % 2 == 0;
        let coords = (1..=self.rank)
            .map(|i| {
                let denom = if is_a2n2 && i == self.rank { big(2) } else { big(1) };
                &w.coords[i] / &denom
            })
            .collect();
        ClWeight { coords }
    }

    /// `cl` of a root (always level zero), in `cl(varpi)` coordinates.
    pub fn cl_of_root(&self, r: &Root) -> ClWeight {
        let b = r.classical_part(self);
        let mut coords = vec![BigRational::zero(); self.rank];
        for (j, bj) in b.iter().enumerate() {
            if *bj == 0 {
                continue;
            }
            for i in 0..self.rank {
                // cl(alpha_{j+1}) = sum_i (gram_{j+1, i+1} / kappa_i) cl(varpi_i)
                coords[i] += &(&big(*bj) * &self.gram[j + 1][i + 1]) / &self.kappa[i];
            }
        }
        ClWeight { coords }
    }

    /// Pairing of two level-zero classical weights via the induced form.
    pub fn cl_pair(&self, a: &ClWeight, b: &ClWeight) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..self.rank {
            if a.coords[i].is_zero() {
                continue;
            }
            for j in 0..self.rank {
                if !b.coords[j].is_zero() {
                    s += &(&(&a.coords[i] * &b.coords[j]) * &(&self.kappa[i] * &self.kappa[j]))
                        * &self.gram_cl_inv[i][j];
                }
            }
        }
        s
    }

    /// `<h_i, x>` for a level-zero classical weight; `i` ranges over all of
    /// `I` (the affine node uses centrality of `c`).
    pub fn cl_coroot_pair(&self, i: usize, x: &ClWeight) -> BigRational {
        if i == 0 {
            let mut s = BigRational::zero();
            for j in 1..=self.rank {
                s += &big(self.comarks[j]) * &self.cl_coroot_pair(j, x);
            }
            return -(&s / &big(self.comarks[0]));
        }
        // <h_i, x> = 2 (x, cl alpha_i) / (alpha_i, alpha_i) = 2 kappa_i x_i / gram_ii.
        &(&(&big(2) * &self.kappa[i - 1]) * &x.coords[i - 1]) / &self.gram[i][i]
    }

    /// `cl(alpha_i)` (`i` in `I_0`) in `cl(varpi)` coordinates.
    pub fn cl_simple_root(&self, i: usize) -> ClWeight {
        self.cl_of_root(&Root::simple(self.rank, i))
    }

    /// Classical simple reflection on a level-zero classical weight, for
    /// `i` in `I_0`.
    pub fn cl_reflect(&self, i: usize, x: &ClWeight) -> ClWeight {
        let c = self.cl_coroot_pair(i, x);
        x.sub(&self.cl_simple_root(i).scaled(&c))
    }

    /// `tilde_alpha`: shortest lattice vector in the positive ray of
    /// `cl(alpha)` inside the translation lattice.
    pub fn tilde_alpha(&self, r: &Root) -> Result<ClWeight> {
        if !self.is_real_root(r)? {
            return Err(Error::domain("tilde_alpha is defined for real roots only"));
        }
        let len2 = self.root_pair(r, r);
        let cl = self.cl_of_root(r);
        let is_a2n2 = self.typ.family == Family::A && self.typ.twist == 2 && self.typ.n % 2 == 0;
        if is_a2n2 {
            if len2 == big(4) {
                Ok(cl.scaled(&(&big(1) / &big(2))))
            } else {
                Ok(cl)
            }
        } else {
            // d_alpha cl(alpha^vee) = max(1, len2/2) * 2/len2 * cl(alpha);
            // this also covers the dual-untwisted case where it equals cl(alpha).
            let half = &len2 / &big(2);
            let d_alpha = if half > BigRational::one() { half.clone() } else { BigRational::one() };
            Ok(cl.scaled(&(&(&big(2) * &d_alpha) / &len2)))
        }
    }

    /// `omega_tilde_i = d_i omega_i^vee` in `cl(varpi)` coordinates; these
    /// form a basis of the translation lattice.
    pub fn omega_tilde(&self, i: usize) -> ClWeight {
        assert!((1..=self.rank).contains(&i));
        let mut coords = vec![BigRational::zero(); self.rank];
        coords[i - 1] = &self.d_node[i] / &self.kappa[i - 1];
        ClWeight { coords }
    }

    /// Express a classical weight in `omega_tilde` coordinates, if integral.
    pub fn omega_tilde_coords(&self, x: &ClWeight) -> Option<Vec<i64>> {
        let mut out = Vec::with_capacity(self.rank);
        for i in 1..=self.rank {
            let unit = &self.d_node[i] / &self.kappa[i - 1];
            let c = &x.coords[i - 1] / &unit;
            if !c.is_integer() {
                return None;
            }
            out.push(i64::try_from(c.to_integer()).ok()?);
        }
        Some(out)
    }

    /// Level-zero lift of a `cl(varpi)`-basis weight into the weight lattice
    /// span (used by the translation formula).
    pub fn lift_cl_weight(&self, x: &ClWeight) -> WeightQ {
        // varpi_i as a rational weight.
        let n = self.rank;
        let mut coords = vec![BigRational::zero(); n + 1];
        let is_a2n2 = self.typ.family == Family::A && self.typ.twist == 2 && self.typ.n % 2 == 0;
        for i in 1..=n {
            let xin = &x.coords[i - 1];
            if xin.is_zero() {
                continue;
            }
            if is_a2n2 && i == n {
                coords[i] += &big(2) * xin;
                coords[0] -= xin;
            } else {
                coords[i] += xin;
                coords[0] -= &big(self.comarks[i]) * xin;
            }
        }
        WeightQ { coords, delta_coord: BigRational::zero() }
    }

    /// JSON description with exact rational entries rendered as strings and
    /// matrices flattened row-major.
    pub fn to_json(&self) -> serde_json::Value {
        let flat = |m: &Vec<Vec<BigRational>>| -> Vec<String> {
            m.iter().flat_map(|row| row.iter().map(|c| c.to_string())).collect()
        };
        let cartan_flat: Vec<String> =
            self.cartan.iter().flat_map(|row| row.iter().map(|c| c.to_string())).collect();
        serde_json::json!({
            "type": self.typ.to_string(),
            "rank": self.rank,
            "cartan": cartan_flat,
            "marks": self.marks.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "comarks": self.comarks.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "gram": flat(&self.gram),
            "d": self.d.to_string(),
            "d_i": self.d_node.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "coxeter": self.coxeter.to_string(),
            "dual_coxeter": self.dual_coxeter.to_string(),
        })
    }
}

/// Weight with rational coordinates (image of a lattice weight under a
/// translation need not be integral in the scaling direction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightQ {
    pub coords: Vec<BigRational>,
    pub delta_coord: BigRational,
}

impl WeightQ {
    pub fn from_weight(w: &Weight) -> Self {
        WeightQ { coords: w.coords.iter().map(|c| big(*c)).collect(), delta_coord: w.delta_coord.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn datum(s: &str) -> Arc<RootDatum> {
        build_root_datum(AffineType::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn a1_affine_table_entry() {
        let d = datum("A1~1");
        assert_eq!(d.cartan, vec![vec![2, -2], vec![-2, 2]]);
        assert_eq!(d.marks, vec![1, 1]);
        assert_eq!(d.comarks, vec![1, 1]);
        assert_eq!(d.d, 1);
        assert_eq!(d.coxeter, 2);
        assert_eq!(d.dual_coxeter, 2);
    }

    #[test]
    fn a2_twisted_reversed_numbering() {
        let d = datum("A2~2");
        assert_eq!(d.cartan, vec![vec![2, -1], vec![-4, 2]]);
        assert_eq!(d.marks, vec![1, 2]);
        assert_eq!(d.comarks, vec![2, 1]);
        assert_eq!(d.gram[0][0], big(4));
        assert_eq!(d.gram[1][1], big(1));
        assert_eq!(d.d, 2);
    }

    #[test]
    fn a2_untwisted_delta_and_coxeter() {
        let d = datum("A2~1");
        assert_eq!(d.delta().coords, vec![1, 1, 1]);
        assert_eq!(d.coxeter, 3);
        assert_eq!(d.dual_coxeter, 3);
    }

    #[test]
    fn every_tabled_type_builds_with_invariants() {
        for typ in AffineType::all_up_to_rank(4) {
            let d = build_root_datum(typ).unwrap();
            assert_eq!(d.rank, typ.rank(), "{typ}");
            // Constructor already asserts the structural invariants; check h
            // and h^vee are consistent sums.
            assert_eq!(d.coxeter, d.marks.iter().sum::<i64>());
            assert_eq!(d.dual_coxeter, d.comarks.iter().sum::<i64>());
        }
    }

    #[test]
    fn delta_pairing_equals_level() {
        let mut rng = StdRng::seed_from_u64(7);
        for typ in AffineType::all_up_to_rank(4) {
            let d = build_root_datum(typ).unwrap();
            for _ in 0..25 {
                let coords: Vec<i64> = (0..=d.rank).map(|_| rng.gen_range(-5..=5)).collect();
                let w = Weight::new(coords, big(rng.gen_range(-3..=3)));
                // (delta, w) via the root-weight pairing must equal the level.
                assert_eq!(d.root_weight_pair(&d.delta(), &w), big(w.level(&d)), "{typ}");
            }
        }
    }

    #[test]
    fn real_root_examples() {
        let a11 = datum("A1~1");
        // alpha_0 + 2 alpha_1 = delta + alpha_1 is real.
        assert!(a11.is_real_root(&Root::new(vec![1, 2])).unwrap());
        // 2 delta is imaginary.
        assert!(!a11.is_real_root(&Root::new(vec![2, 2])).unwrap());
        assert!(a11.is_real_root(&Root::zero(1)).is_err());

        // delta - 2 alpha_n in A_{2n}^(2).
        let a22 = datum("A2~2");
        assert!(a22.is_real_root(&Root::new(vec![1, 0])).unwrap());
        let a42 = datum("A4~2");
        // delta = (1, 2, 2); delta - 2 alpha_2 = (1, 2, 0).
        assert!(a42.is_real_root(&Root::new(vec![1, 2, 0])).unwrap());
    }

    #[test]
    fn d_alpha_examples() {
        let a11 = datum("A1~1");
        assert_eq!(a11.d_alpha(&Root::simple(1, 1)).unwrap(), big(1));
        let a22 = datum("A2~2");
        assert_eq!(a22.d_alpha(&Root::simple(1, 0)).unwrap(), big(2));
        // Long classical root of the C_2^(1) datum: theta = 2 alpha_1 + alpha_2
        // has squared length 2 under this normalization, so d_alpha = 1.
        let c21 = datum("C2~1");
        let theta = Root::new(vec![0, 2, 1]);
        assert_eq!(c21.root_pair(&theta, &theta), big(2));
        assert_eq!(c21.d_alpha(&theta).unwrap(), big(1));
        assert!(a11.d_alpha(&Root::new(vec![1, 1])).is_err());
    }

    #[test]
    fn positive_root_enumeration_a1() {
        let d = datum("A1~1");
        let roots = d.enumerate_positive_roots(1);
        let plus: Vec<_> = roots
            .iter()
            .filter_map(|r| match r {
                PositiveRoot::ClassicalPlus(c) => Some(c.clone()),
                _ => None,
            })
            .collect();
        let minus: Vec<_> = roots
            .iter()
            .filter_map(|r| match r {
                PositiveRoot::ClassicalMinus(c) => Some(c.clone()),
                _ => None,
            })
            .collect();
        let imag: Vec<_> = roots
            .iter()
            .filter_map(|r| match r {
                PositiveRoot::Imaginary { m, node } => Some((*m, *node)),
                _ => None,
            })
            .collect();
        assert_eq!(plus, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(minus, vec![vec![1, 0]]);
        assert_eq!(imag, vec![(1, 1)]);

        let only_simple = d.enumerate_positive_roots(0);
        assert_eq!(only_simple.len(), 1);
        assert_eq!(only_simple[0], PositiveRoot::ClassicalPlus(vec![0, 1]));
    }

    #[test]
    fn imaginary_multiplicity_filter_a2_twisted() {
        let d = datum("A2~2");
        // I_0 node has d_1 = 1, so (delta, 1) appears at cutoff 1.
        let imag: Vec<_> = d
            .enumerate_positive_roots(1)
            .into_iter()
            .filter(|r| matches!(r, PositiveRoot::Imaginary { .. }))
            .collect();
        assert_eq!(imag, vec![PositiveRoot::Imaginary { m: 1, node: 1 }]);
    }

    #[test]
    fn real_root_window_closed_under_reflections() {
        for s in ["A1~1", "A2~1", "A2~2", "C2~1"] {
            let d = datum(s);
            for r in d.enumerate_positive_roots(3) {
                let coords = match r {
                    PositiveRoot::ClassicalPlus(c) | PositiveRoot::ClassicalMinus(c) => c,
                    PositiveRoot::Imaginary { .. } => continue,
                };
                let root = Root::new(coords);
                for i in 0..=d.rank {
                    let img = d.reflect_root(i, &root);
                    assert!(d.is_real_root(&img).unwrap(), "{s}: reflection left the real roots");
                }
            }
        }
    }

    #[test]
    fn d_alpha_divisibility_criterion() {
        for s in ["A1~1", "A2~1", "A2~2", "C2~1"] {
            let d = datum(s);
            for r in d.enumerate_positive_roots(3) {
                let coords = match r {
                    PositiveRoot::ClassicalPlus(c) | PositiveRoot::ClassicalMinus(c) => c,
                    PositiveRoot::Imaginary { .. } => continue,
                };
                let root = Root::new(coords);
                let da = d.d_alpha(&root).unwrap();
                for m in 1..=4i64 {
                    let shifted = root.add(&d.delta().scaled(m));
                    let divisible = (&big(m) / &da).is_integer();
                    assert_eq!(
                        d.is_real_root(&shifted).unwrap(),
                        divisible,
                        "{s}: m delta + alpha realness must match d_alpha | m"
                    );
                }
            }
        }
    }

    #[test]
    fn cl_projection_and_tilde_alpha() {
        let a11 = datum("A1~1");
        // cl(delta) = 0.
        let delta = a11.delta();
        assert!(a11.cl_of_root(&delta).is_zero());
        // Untwisted: tilde(alpha_1) = cl(alpha_1^vee) = cl(alpha_1).
        let t = a11.tilde_alpha(&Root::simple(1, 1)).unwrap();
        assert_eq!(t, a11.cl_simple_root(1));

        let a22 = datum("A2~2");
        // tilde(alpha_0) = cl(alpha_0)/2 in the (alpha_0, alpha_0) = 4 case.
        let t0 = a22.tilde_alpha(&Root::simple(1, 0)).unwrap();
        let half = &big(1) / &big(2);
        assert_eq!(t0, a22.cl_of_root(&Root::simple(1, 0)).scaled(&half));
        assert!(a22.tilde_alpha(&a22.delta()).is_err());
    }

    #[test]
    fn classical_gram_positive_definite_and_symmetric() {
        for typ in AffineType::all_up_to_rank(4) {
            let d = build_root_datum(typ).unwrap();
            for i in 0..=d.rank {
                for j in 0..=d.rank {
                    assert_eq!(d.gram[i][j], d.gram[j][i]);
                }
            }
            // Orbit sanity: cl pairing of omega_tilde with cl(alpha) integral.
            for i in 1..=d.rank {
                let ot = d.omega_tilde(i);
                for j in 1..=d.rank {
                    let p = d.cl_pair(&ot, &d.cl_simple_root(j));
                    if i == j {
                        assert_eq!(p, d.d_node[i], "{typ}");
                    } else {
                        assert!(p.is_zero(), "{typ}");
                    }
                }
            }
        }
    }

    #[test]
    fn weight_form_matches_coroot_pairing_on_delta() {
        let mut rng = StdRng::seed_from_u64(11);
        for s in ["A1~1", "A2~1", "A2~2", "C2~1", "G2~1"] {
            let d = datum(s);
            for _ in 0..20 {
                let coords: Vec<i64> = (0..=d.rank).map(|_| rng.gen_range(-4..=4)).collect();
                let w = Weight::new(coords, big(rng.gen_range(-2..=2)));
                let delta_as_weight = Weight::new(
                    (0..=d.rank).map(|j| (0..=d.rank).map(|i| d.cartan[j][i] * d.marks[i]).sum()).collect(),
                    big(d.marks[0]),
                );
                assert_eq!(d.weight_pair(&delta_as_weight, &w), big(w.level(&d)), "{s}");
            }
        }
    }
}
