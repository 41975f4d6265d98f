//! The affine and extended affine Weyl groups.
//!
//! Elements are stored as exact matrices on the weight space in the basis
//! `alpha_0, ..., alpha_n, Lambda_0`, which makes multiplication, equality,
//! inversion and the action on weights and roots structural. The canonical
//! `t(xi) wbar tau` decomposition, lengths by inversion counting, the fixed
//! reduced word for `omega_tilde_n ... omega_tilde_1`, and the doubly
//! infinite sequence with its `beta_k` roots live here.

use num::rational::BigRational;
use num::{One, Zero};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rootdata::{big_rational_from, ClWeight, PositiveRoot, Root, RootDatum, Weight, WeightQ};

fn big(n: i64) -> BigRational {
    big_rational_from(n)
}

/// Permutation of the node set `I`, used for diagram automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodePerm {
    pub images: Vec<usize>,
}

impl NodePerm {
    pub fn identity(rank: usize) -> Self {
        NodePerm { images: (0..=rank).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self` after `inner`: `(self . inner)(x) = self(inner(x))`.
    pub fn compose(&self, inner: &NodePerm) -> NodePerm {
        NodePerm { images: inner.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> NodePerm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        NodePerm { images }
    }

    pub fn pow(&self, k: i64) -> NodePerm {
        let rank = self.images.len() - 1;
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = NodePerm::identity(rank);
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }
}

/// Element of the extended affine Weyl group, acting on the weight space.
#[derive(Clone, Debug)]
pub struct ExtendedWeylElement {
    datum: Arc<RootDatum>,
    /// Column `j` is the image of basis vector `j` in the basis
    /// `alpha_0..alpha_n, Lambda_0`.
    mat: Vec<Vec<BigRational>>,
}

impl PartialEq for ExtendedWeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.datum.typ == other.datum.typ && self.mat == other.mat
    }
}

impl Eq for ExtendedWeylElement {}

/// Canonical `t(xi) wbar tau` form: the translation lattice part (integral
/// in the `omega_tilde` basis), the classical part as a word in `I_0`
/// reflections, and the diagram automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub xi: Vec<i64>,
    pub wbar_word: Vec<usize>,
    pub tau: NodePerm,
}

impl ExtendedWeylElement {
    fn dim(&self) -> usize {
        self.datum.rank + 2
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn identity(datum: &Arc<RootDatum>) -> Self {
        let dim = datum.rank + 2;
        let mat = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        ExtendedWeylElement { datum: datum.clone(), mat }
    }

    /// Simple reflection `s_i`, `i` in `I`.
    pub fn simple(datum: &Arc<RootDatum>, i: usize) -> Self {
        assert!(i <= datum.rank);
        let mut e = Self::identity(datum);
        // alpha_j -> alpha_j - a_{ij} alpha_i; Lambda_0 -> Lambda_0 - d_{i0} alpha_i.
        for j in 0..=datum.rank {
            e.mat[i][j] -= big(datum.cartan[i][j]);
        }
        if i == 0 {
            e.mat[0][datum.rank + 1] -= BigRational::one();
        }
        ExtendedWeylElement { datum: datum.clone(), mat: e.mat }
    }

    /// Translation by a level-zero classical weight (an element of the
    /// translation lattice in all uses).
    pub fn translation(datum: &Arc<RootDatum>, xi: &ClWeight) -> Self {
        let n = datum.rank;
        let lift = datum.lift_cl_weight(xi);
        let (y, l) = datum.weight_alpha_coords_q(&lift.coords, &lift.delta_coord);
        debug_assert!(l.is_zero());
        // Pairings of the lift with the basis vectors.
        let pair_alpha = |j: usize| -> BigRational {
            let mut s = BigRational::zero();
            for i in 0..=n {
                if !y[i].is_zero() {
                    s += &y[i] * &datum.gram[i][j];
                }
            }
            s
        };
        let xi_norm = {
            let mut s = BigRational::zero();
            for i in 0..=n {
                for j in 0..=n {
                    if !y[i].is_zero() && !y[j].is_zero() {
                        s += &(&y[i] * &y[j]) * &datum.gram[i][j];
                    }
                }
            }
            s
        };
        let pair_lambda0 = &y[0] * &(&datum.gram[0][0] / &big(2));
        let mut mat = Self::identity(datum).mat;
        // Columns for alpha_j: alpha_j - (alpha_j, xi) delta.
        for j in 0..=n {
            let p = pair_alpha(j);
            if !p.is_zero() {
                for (r, row) in mat.iter_mut().enumerate().take(n + 1) {
                    row[j] -= &p * &big(datum.marks[r]);
                }
            }
        }
        // Column for Lambda_0:
        // Lambda_0 + a_0^vee xi - ((Lambda_0, xi) + (xi,xi)/2 a_0^vee) delta.
        let a0v = big(datum.comarks[0]);
        let coef = &pair_lambda0 + &(&(&xi_norm / &big(2)) * &a0v);
        for r in 0..=n {
            mat[r][n + 1] += &(&a0v * &y[r]) - &(&coef * &big(datum.marks[r]));
        }
        ExtendedWeylElement { datum: datum.clone(), mat }
    }

    /// Build from a word in simple reflections (applied left to right as a
    /// product, i.e. `word[0]` acts last).
    pub fn from_word(datum: &Arc<RootDatum>, word: &[usize]) -> Self {
        let mut acc = Self::identity(datum);
        for &i in word {
            acc = acc.mul(&Self::simple(datum, i));
        }
        acc
    }

    /// Diagram automorphism as a group element. Only permutations arising
    /// from length-zero elements of the extended group are meaningful here.
    pub fn from_diagram_perm(datum: &Arc<RootDatum>, perm: &NodePerm) -> Self {
        let n = datum.rank;
        let dim = n + 2;
        let mut mat = vec![vec![BigRational::zero(); dim]; dim];
        for j in 0..=n {
            mat[perm.apply(j)][j] = BigRational::one();
        }
        // Lambda_0 -> Lambda_{sigma(0)} + x delta with x fixed by isotropy.
        let s0 = perm.apply(0);
        let lam = Weight::fundamental(n, s0);
        let norm = datum.weight_pair(&lam, &lam);
        let x = -(&norm / &(&big(2) * &big(datum.comarks[s0])));
        let (y, l) = datum.weight_alpha_coords_q(
            &lam.coords.iter().map(|c| big(*c)).collect::<Vec<_>>(),
            &BigRational::zero(),
        );
        for r in 0..=n {
            mat[r][n + 1] = &y[r] + &(&x * &big(datum.marks[r]));
        }
        mat[n + 1][n + 1] = l;
        ExtendedWeylElement { datum: datum.clone(), mat }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let dim = self.dim();
        let mut mat = vec![vec![BigRational::zero(); dim]; dim];
        for r in 0..dim {
            for k in 0..dim {
                if self.mat[r][k].is_zero() {
                    continue;
                }
                for c in 0..dim {
                    if !rhs.mat[k][c].is_zero() {
                        mat[r][c] += &self.mat[r][k] * &rhs.mat[k][c];
                    }
                }
            }
        }
        ExtendedWeylElement { datum: self.datum.clone(), mat }
    }

    pub fn inverse(&self) -> Self {
        let inv = crate::rootdata::invert_matrix(&self.mat).expect("group element invertible");
        ExtendedWeylElement { datum: self.datum.clone(), mat: inv }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.datum)
    }

    /// Action on a root (image has integral coordinates).
    pub fn act_root(&self, r: &Root) -> Root {
        let n = self.datum.rank;
        let mut out = vec![BigRational::zero(); n + 1];
        for (j, c) in r.coords.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            for i in 0..=n {
                out[i] += &big(*c) * &self.mat[i][j];
            }
        }
        Root::new(
            out.into_iter()
                .map(|c| {
                    assert!(c.is_integer(), "root image must stay in the root lattice");
                    i64::try_from(c.to_integer()).expect("root coordinate fits i64")
                })
                .collect(),
        )
    }

    /// Action on a weight (rational scaling coordinate preserved exactly).
    pub fn act_weight(&self, w: &Weight) -> Weight {
        let q = self.act_weight_q(&WeightQ::from_weight(w));
        Weight::new(
            q.coords
                .iter()
                .map(|c| {
                    assert!(c.is_integer(), "weight image must stay in the weight lattice");
                    i64::try_from(c.to_integer().clone()).expect("weight coordinate fits i64")
                })
                .collect(),
            q.delta_coord,
        )
    }

    pub fn act_weight_q(&self, w: &WeightQ) -> WeightQ {
        let n = self.datum.rank;
        let (y, l) = self.datum.weight_alpha_coords_q(&w.coords, &w.delta_coord);
        let dim = n + 2;
        let mut v = vec![BigRational::zero(); dim];
        for (j, c) in y.iter().chain(std::iter::once(&l)).enumerate() {
            if c.is_zero() {
                continue;
            }
            for i in 0..dim {
                v[i] += c * &self.mat[i][j];
            }
        }
        // Back to coroot coordinates.
        let lvl = v[n + 1].clone();
        let coords: Vec<BigRational> = (0..=n)
            .map(|j| {
                let mut s = if j == 0 { lvl.clone() } else { BigRational::zero() };
                for i in 0..=n {
                    s += &big(self.datum.cartan[j][i]) * &v[i];
                }
                s
            })
            .collect();
        WeightQ { coords, delta_coord: v[0].clone() }
    }

    /// Action on a level-zero classical weight (only the classical part of
    /// the element matters).
    pub fn act_cl(&self, x: &ClWeight) -> ClWeight {
        let lift = self.datum.lift_cl_weight(x);
        let img = self.act_weight_q(&lift);
        self.datum.cl_project_q(&img)
    }

    /// If the element permutes the simple roots, return the permutation.
    pub fn as_diagram_perm(&self) -> Option<NodePerm> {
        let n = self.datum.rank;
        let mut images = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let img = self.act_root(&Root::simple(n, j));
            let mut found = None;
            for i in 0..=n {
                if img == Root::simple(n, i) {
                    found = Some(i);
                    break;
                }
            }
            images.push(found?);
        }
        let perm = NodePerm { images };
        let mut seen = vec![false; n + 1];
        for &i in &perm.images {
            if seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(perm)
    }

    /// Length: number of positive real roots sent to negative roots.
    pub fn length(&self) -> usize {
        let datum = &self.datum;
        let d_max: i64 = datum
            .d_node
            .iter()
            .map(|d| i64::try_from(d.to_integer()).expect("d_i is a small integer"))
            .max()
            .unwrap_or(1);
        let seed = datum.enumerate_positive_roots(d_max);
        let mut bound = d_max + 1;
        for r in &seed {
            if let PositiveRoot::ClassicalPlus(c) | PositiveRoot::ClassicalMinus(c) = r {
                let img = self.act_root(&Root::new(c.clone()));
                bound = bound.max(img.delta_degree(datum).abs() + d_max + 1);
            }
        }
        let mut count = 0usize;
        for r in datum.enumerate_positive_roots(bound) {
            if let PositiveRoot::ClassicalPlus(c) | PositiveRoot::ClassicalMinus(c) = r {
                if self.act_root(&Root::new(c)).is_negative() {
                    count += 1;
                }
            }
        }
        count
    }

    /// Write the element as `s_{j_1} ... s_{j_m} tau` with the word reduced
    /// and `tau` of length zero, using the lexicographically least admissible
    /// left descent at every step.
    pub fn word_and_tau(&self) -> (Vec<usize>, NodePerm) {
        let n = self.datum.rank;
        let mut word = Vec::new();
        let mut cur = self.clone();
        let cap = self.length() + 1;
        for _ in 0..=cap {
            if let Some(perm) = cur.as_diagram_perm() {
                return (word, perm);
            }
            let inv = cur.inverse();
            let i = (0..=n)
                .find(|&i| inv.act_root(&Root::simple(n, i)).is_negative())
                .expect("a positive-length element has a left descent");
            word.push(i);
            cur = Self::simple(&self.datum, i).mul(&cur);
        }
        unreachable!("descent did not terminate within the length bound");
    }

    /// Canonical decomposition `self = t(xi) wbar tau` with `xi` in the
    /// translation lattice (in `omega_tilde` coordinates), `wbar` a word in
    /// classical reflections, and `tau` a diagram automorphism.
    pub fn translation_decompose(&self) -> Decomposition {
        let datum = &self.datum;
        let n = datum.rank;
        let (word, tau) = self.word_and_tau();
        let w_aff = Self::from_word(datum, &word);
        // Classical image: act on cl(varpi_i) basis.
        let wbar_word = {
            // Build the integral action on the classical root lattice.
            let mut m: Vec<Vec<i64>> = (0..n)
                .map(|j| {
                    let img = w_aff.act_cl_root_coords(j + 1);
                    img
                })
                .collect();
            // m[j] = coordinates of wbar(cl alpha_{j+1}); extract a reduced
            // word by right descents.
            let mut word_rev = Vec::new();
            let mut guard = 0;
            loop {
                guard += 1;
                assert!(guard < 10_000, "classical descent must terminate");
                // Identity?
                let is_id = m.iter().enumerate().all(|(j, col)| {
                    col.iter().enumerate().all(|(k, &c)| c == i64::from(k == j))
                });
                if is_id {
                    break;
                }
                let i = (0..n)
                    .find(|&i| m[i].iter().all(|&c| c <= 0))
                    .expect("non-identity classical element has a descent");
                // Multiply on the right by s_{i+1}: new action on cl alpha_k is
                // wbar(s_i(cl alpha_k)).
                word_rev.push(i + 1);
                let mut next = m.clone();
                for k in 0..n {
                    // s_i(alpha_k) = alpha_k - a_{(i+1)(k+1)} alpha_i.
                    let a = datum.cartan[i + 1][k + 1];
                    for (r, val) in next[k].iter_mut().enumerate() {
                        *val = m[k][r] - a * m[i][r];
                    }
                }
                m = next;
            }
            word_rev.reverse();
            word_rev
        };
        let wbar = Self::from_word(datum, &wbar_word);
        let trans = w_aff.mul(&wbar.inverse());
        // Extract the translation vector from the image of Lambda_0.
        let lam0 = WeightQ {
            coords: {
                let mut c = vec![BigRational::zero(); n + 1];
                c[0] = BigRational::one();
                c
            },
            delta_coord: BigRational::zero(),
        };
        let img = trans.act_weight_q(&lam0);
        let xi_cl = datum.cl_project_q(&img);
        let xi = datum
            .omega_tilde_coords(&xi_cl)
            .expect("translation part must lie in the translation lattice");
        let dec = Decomposition { xi, wbar_word, tau };
        debug_assert_eq!(&self.recompose_check(&dec), self);
        dec
    }

    fn recompose_check(&self, dec: &Decomposition) -> Self {
        Self::recompose(&self.datum, dec)
    }

    /// Multiply a decomposition back into a group element.
    pub fn recompose(datum: &Arc<RootDatum>, dec: &Decomposition) -> Self {
        let mut xi_cl = ClWeight::zero(datum.rank);
        for (i, &c) in dec.xi.iter().enumerate() {
            xi_cl = xi_cl.add(&datum.omega_tilde(i + 1).scaled(&big(c)));
        }
        let t = Self::translation(datum, &xi_cl);
        let w = Self::from_word(datum, &dec.wbar_word);
        let tau = Self::from_diagram_perm(datum, &dec.tau);
        t.mul(&w).mul(&tau)
    }

    /// Coordinates of the image of `cl(alpha_j)` over the `cl(alpha)` basis
    /// (integral since the classical root lattice is preserved).
    fn act_cl_root_coords(&self, j: usize) -> Vec<i64> {
        let datum = &self.datum;
        let n = datum.rank;
        let img = self.act_root(&Root::simple(n, j));
        img.classical_part(datum)
    }
}

/// The doubly infinite sequence attached to the fixed reduced expression of
/// `omega_tilde_n ... omega_tilde_1 = s_{i_1} ... s_{i_N} tau`.
#[derive(Clone, Debug)]
pub struct HSequence {
    datum: Arc<RootDatum>,
    /// Base window `i_1 ... i_N`.
    pub window: Vec<usize>,
    pub tau: NodePerm,
}

impl HSequence {
    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn period(&self) -> usize {
        self.window.len()
    }

    /// `i_k` for any integer `k`, via `i_{k+N} = tau(i_k)`.
    pub fn letter(&self, k: i64) -> usize {
        let n = self.window.len() as i64;
        let r = (k - 1).rem_euclid(n);
        let q = (k - 1 - r) / n;
        self.tau.pow(q).apply(self.window[r as usize])
    }

    /// `beta_k` per the two-branch reflection formula. For `k <= 0` the
    /// result has positive classical part, for `k > 0` negative.
    pub fn beta(&self, k: i64) -> Root {
        let datum = &self.datum;
        let n = datum.rank;
        let mut r = Root::simple(n, self.letter(k));
        if k <= 0 {
            for m in (k + 1)..=0 {
                r = datum.reflect_root(self.letter(m), &r);
            }
        } else {
            for m in (1..k).rev() {
                r = datum.reflect_root(self.letter(m), &r);
            }
        }
        r
    }

    /// Shift the frame by `p`: the sequence `j_k = i_{k+p}` (an h-sequence
    /// for the same tau).
    pub fn shifted(&self, p: i64) -> HSequence {
        let window = (1..=self.window.len() as i64).map(|k| self.letter(k + p)).collect();
        HSequence { datum: self.datum.clone(), window, tau: self.tau.clone() }
    }
}

/// Compute the fixed reduced word for `omega_tilde_n ... omega_tilde_1`.
///
/// Each factor `t(omega_tilde_i)` is decomposed by greedy left descent
/// (lexicographically least admissible letter); the factors are concatenated
/// from `i = n` down to `i = 1`, pushing the accumulated diagram
/// automorphisms through. This makes the `omega_tilde_n` part appear first.
pub fn omega_word(datum: &Arc<RootDatum>) -> Result<HSequence> {
    let n = datum.rank;
    let mut word: Vec<usize> = Vec::new();
    let mut acc = NodePerm::identity(n);
    let mut total_len = 0usize;
    for i in (1..=n).rev() {
        let t = ExtendedWeylElement::translation(datum, &datum.omega_tilde(i));
        let (w, tau_i) = t.word_and_tau();
        total_len += w.len();
        word.extend(w.iter().map(|&l| acc.apply(l)));
        acc = acc.compose(&tau_i);
    }
    let tau = acc;
    // Reducedness re-check: the concatenation must still be reduced.
    let elt = ExtendedWeylElement::from_word(datum, &word);
    if elt.length() != total_len || word.len() != total_len {
        return Err(Error::domain("omega word concatenation failed to stay reduced"));
    }
    // The full product must reproduce t(sum omega_tilde_i).
    let mut sum = ClWeight::zero(n);
    for i in 1..=n {
        sum = sum.add(&datum.omega_tilde(i));
    }
    let expect = ExtendedWeylElement::translation(datum, &sum);
    let got = elt.mul(&ExtendedWeylElement::from_diagram_perm(datum, &tau));
    if expect != got {
        return Err(Error::domain("omega word decomposition mismatch"));
    }
    Ok(HSequence { datum: datum.clone(), window: word, tau })
}

/// Orbit of a classical weight under the classical Weyl group.
pub fn classical_orbit(datum: &RootDatum, x: &ClWeight) -> Vec<ClWeight> {
    let mut seen = vec![x.clone()];
    let mut frontier = vec![x.clone()];
    while let Some(y) = frontier.pop() {
        for i in 1..=datum.rank {
            let img = datum.cl_reflect(i, &y);
            if !seen.contains(&img) {
                seen.push(img.clone());
                frontier.push(img);
            }
        }
    }
    seen
}
