//! Level-zero fundamental crystals of type `A_n^(1)` and their tensor
//! products.
//!
//! The level-`i` fundamental crystal is realized on columns (strictly
//! increasing subsets of `{1, ..., n+1}` of size `i`) with classical
//! operators moving single entries and the affine operators conjugated
//! through promotion. Tensor operators follow the signature rule in the
//! orientation fixed by the coproduct convention; the axiom suite in the
//! tests is the arbiter for that choice.

use num::rational::BigRational;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rootdata::{ClWeight, Family, RootDatum, Weight};
use crate::weyl::classical_orbit;

/// Column: strictly increasing subset of `{1, ..., n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnElement {
    entries: Vec<u8>,
}

impl ColumnElement {
    pub fn new(mut entries: Vec<u8>) -> Self {
        entries.sort_unstable();
        entries.dedup();
        ColumnElement { entries }
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn contains(&self, v: u8) -> bool {
        self.entries.binary_search(&v).is_ok()
    }

    /// Promotion: add 1 to every entry mod `n+1` (values stay in
    /// `1..=n+1`), reseated.
    fn promote(&self, n: usize) -> ColumnElement {
        let top = (n + 1) as u8;
        ColumnElement::new(self.entries.iter().map(|&v| if v == top { 1 } else { v + 1 }).collect())
    }

    fn demote(&self, n: usize) -> ColumnElement {
        let top = (n + 1) as u8;
        ColumnElement::new(self.entries.iter().map(|&v| if v == 1 { top } else { v - 1 }).collect())
    }

    /// Classical `f_i` (`i` in `I_0`): replace an entry `i` by `i+1`.
    fn f_classical(&self, i: u8) -> Option<ColumnElement> {
        if self.contains(i) && !self.contains(i + 1) {
            let entries = self.entries.iter().map(|&v| if v == i { i + 1 } else { v }).collect();
            Some(ColumnElement::new(entries))
        } else {
            None
        }
    }

    fn e_classical(&self, i: u8) -> Option<ColumnElement> {
        if self.contains(i + 1) && !self.contains(i) {
            let entries = self.entries.iter().map(|&v| if v == i + 1 { i } else { v }).collect();
            Some(ColumnElement::new(entries))
        } else {
            None
        }
    }

    pub fn f(&self, n: usize, i: usize) -> Option<ColumnElement> {
        if i == 0 {
            // f_0 = promote^{-1} . f_1 . promote.
            self.promote(n).f_classical(1).map(|c| c.demote(n))
        } else {
            self.f_classical(i as u8)
        }
    }

    pub fn e(&self, n: usize, i: usize) -> Option<ColumnElement> {
        if i == 0 {
            self.promote(n).e_classical(1).map(|c| c.demote(n))
        } else {
            self.e_classical(i as u8)
        }
    }

    fn eps(&self, n: usize, i: usize) -> i64 {
        i64::from(self.e(n, i).is_some())
    }

    fn phi(&self, n: usize, i: usize) -> i64 {
        i64::from(self.f(n, i).is_some())
    }

    /// Classical weight in `cl(varpi)` coordinates.
    pub fn weight(&self, datum: &RootDatum) -> ClWeight {
        let n = datum.rank;
        let coords = (1..=n as u8)
            .map(|j| {
                let v = i64::from(self.contains(j)) - i64::from(self.contains(j + 1));
                BigRational::from_integer(v.into())
            })
            .collect();
        ClWeight { coords }
    }
}

impl fmt::Display for ColumnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Element of a tensor product of column crystals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorElement {
    pub factors: Vec<ColumnElement>,
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "x")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Tensor element with one `z`-exponent per factor (affinization).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineElement {
    pub base: TensorElement,
    pub z_exponents: Vec<i64>,
}

/// The crystal `B_W(lambda)` of type `A_n^(1)`: `lambda_i` copies of the
/// level-`i` column crystal, factors listed by ascending node.
pub struct TensorCrystal {
    datum: Arc<RootDatum>,
    pub lambda: Vec<i64>,
    /// Column size of each tensor factor.
    pub factor_sizes: Vec<usize>,
    pub elements: Vec<TensorElement>,
    index: HashMap<TensorElement, usize>,
}

fn require_type_a(datum: &RootDatum) -> Result<()> {
    if datum.typ.family == Family::A && datum.typ.twist == 1 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "unsupported type {} (column crystals exist for A_n~1 only)",
            datum.typ
        )))
    }
}

fn subsets_of_size(n: usize, k: usize) -> Vec<ColumnElement> {
    fn rec(start: u8, top: u8, left: usize, acc: &mut Vec<u8>, out: &mut Vec<ColumnElement>) {
        if left == 0 {
            out.push(ColumnElement::new(acc.clone()));
            return;
        }
        for v in start..=top {
            if (top - v + 1) as usize >= left {
                acc.push(v);
                rec(v + 1, top, left - 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(1, (n + 1) as u8, k, &mut Vec::new(), &mut out);
    out
}

impl TensorCrystal {
    /// Materialize `B_W(lambda)`; `lambda` is dominant with `lambda[i-1]`
    /// copies of the level-`i` crystal.
    pub fn build(datum: &Arc<RootDatum>, lambda: &[i64]) -> Result<TensorCrystal> {
        require_type_a(datum)?;
        let n = datum.rank;
        if lambda.len() != n {
            return Err(Error::domain(format!("lambda must have {n} entries")));
        }
        if lambda.iter().any(|&c| c < 0) {
            return Err(Error::domain("lambda must be dominant (non-negative)"));
        }
        let mut factor_sizes = Vec::new();
        for (i, &mult) in lambda.iter().enumerate() {
            for _ in 0..mult {
                factor_sizes.push(i + 1);
            }
        }
        let options: Vec<Vec<ColumnElement>> = factor_sizes.iter().map(|&k| subsets_of_size(n, k)).collect();
        let mut elements = vec![TensorElement { factors: Vec::new() }];
        for opts in &options {
            let mut next = Vec::with_capacity(elements.len() * opts.len());
            for el in &elements {
                for o in opts {
                    let mut factors = el.factors.clone();
                    factors.push(o.clone());
                    next.push(TensorElement { factors });
                }
            }
            elements = next;
        }
        let index = elements.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
        Ok(TensorCrystal { datum: datum.clone(), lambda: lambda.to_vec(), factor_sizes, elements, index })
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, el: &TensorElement) -> Option<usize> {
        self.index.get(el).copied()
    }

    /// Highest-weight tensor element: every factor the initial column
    /// `{1, ..., k}`.
    pub fn leading_element(&self) -> TensorElement {
        TensorElement {
            factors: self.factor_sizes.iter().map(|&k| ColumnElement::new((1..=k as u8).collect())).collect(),
        }
    }

    pub fn weight(&self, el: &TensorElement) -> ClWeight {
        let mut w = ClWeight::zero(self.datum.rank);
        for f in &el.factors {
            w = w.add(&f.weight(&self.datum));
        }
        w
    }

    fn eps_slice(&self, factors: &[ColumnElement], i: usize) -> i64 {
        let n = self.datum.rank;
        match factors.len() {
            0 => 0,
            1 => factors[0].eps(n, i),
            len => {
                let (prefix, last) = factors.split_at(len - 1);
                let ep = self.eps_slice(prefix, i);
                let el = factors[len - 1].eps(n, i);
                let _ = el;
                let e_last = last[0].eps(n, i);
                let wt_last = self.pair_i(i, &last[0].weight(&self.datum));
                e_last.max(ep - wt_last)
            }
        }
    }

    fn phi_slice(&self, factors: &[ColumnElement], i: usize) -> i64 {
        let n = self.datum.rank;
        match factors.len() {
            0 => 0,
            1 => factors[0].phi(n, i),
            len => {
                let (prefix, last) = factors.split_at(len - 1);
                let pp = self.phi_slice(prefix, i);
                let p_last = last[0].phi(n, i);
                let mut wt_prefix = ClWeight::zero(n);
                for f in prefix {
                    wt_prefix = wt_prefix.add(&f.weight(&self.datum));
                }
                pp.max(p_last + self.pair_i(i, &wt_prefix))
            }
        }
    }

    fn pair_i(&self, i: usize, w: &ClWeight) -> i64 {
        let v = self.datum.cl_coroot_pair(i, w);
        assert!(v.is_integer());
        i64::try_from(v.to_integer()).expect("pairing fits i64")
    }

    fn f_slice(&self, factors: &[ColumnElement], i: usize) -> Option<(Vec<ColumnElement>, usize)> {
        let n = self.datum.rank;
        match factors.len() {
            0 => None,
            1 => factors[0].f(n, i).map(|c| (vec![c], 0)),
            len => {
                let (prefix, last) = factors.split_at(len - 1);
                let phi_last = last[0].phi(n, i);
                let eps_prefix = self.eps_slice(prefix, i);
                if phi_last > eps_prefix {
                    let img = last[0].f(n, i).expect("phi > 0 means f acts");
                    let mut out = prefix.to_vec();
                    out.push(img);
                    Some((out, len - 1))
                } else {
                    let (new_prefix, acted) = self.f_slice(prefix, i)?;
                    let mut out = new_prefix;
                    out.push(last[0].clone());
                    Some((out, acted))
                }
            }
        }
    }

    fn e_slice(&self, factors: &[ColumnElement], i: usize) -> Option<(Vec<ColumnElement>, usize)> {
        let n = self.datum.rank;
        match factors.len() {
            0 => None,
            1 => factors[0].e(n, i).map(|c| (vec![c], 0)),
            len => {
                let (prefix, last) = factors.split_at(len - 1);
                let phi_last = last[0].phi(n, i);
                let eps_prefix = self.eps_slice(prefix, i);
                if phi_last >= eps_prefix {
                    let img = last[0].e(n, i)?;
                    let mut out = prefix.to_vec();
                    out.push(img);
                    Some((out, len - 1))
                } else {
                    let (new_prefix, acted) = self.e_slice(prefix, i)?;
                    let mut out = new_prefix;
                    out.push(last[0].clone());
                    Some((out, acted))
                }
            }
        }
    }

    /// Lowering operator; also reports which tensor factor moved.
    pub fn f_with_position(&self, i: usize, el: &TensorElement) -> Option<(TensorElement, usize)> {
        self.f_slice(&el.factors, i).map(|(factors, pos)| (TensorElement { factors }, pos))
    }

    pub fn e_with_position(&self, i: usize, el: &TensorElement) -> Option<(TensorElement, usize)> {
        self.e_slice(&el.factors, i).map(|(factors, pos)| (TensorElement { factors }, pos))
    }

    pub fn f(&self, i: usize, el: &TensorElement) -> Option<TensorElement> {
        self.f_with_position(i, el).map(|(t, _)| t)
    }

    pub fn e(&self, i: usize, el: &TensorElement) -> Option<TensorElement> {
        self.e_with_position(i, el).map(|(t, _)| t)
    }

    pub fn eps(&self, i: usize, el: &TensorElement) -> i64 {
        self.eps_slice(&el.factors, i)
    }

    pub fn phi(&self, i: usize, el: &TensorElement) -> i64 {
        self.phi_slice(&el.factors, i)
    }

    /// Affine operators on affinized elements: index 0 shifts the acted
    /// factor's exponent (+1 for `e_0`, -1 for `f_0`).
    pub fn f_aff(&self, i: usize, el: &AffineElement) -> Option<AffineElement> {
        let (base, pos) = self.f_with_position(i, &el.base)?;
        let mut z = el.z_exponents.clone();
        if i == 0 {
            z[pos] -= 1;
        }
        Some(AffineElement { base, z_exponents: z })
    }

    pub fn e_aff(&self, i: usize, el: &AffineElement) -> Option<AffineElement> {
        let (base, pos) = self.e_with_position(i, &el.base)?;
        let mut z = el.z_exponents.clone();
        if i == 0 {
            z[pos] += 1;
        }
        Some(AffineElement { base, z_exponents: z })
    }

    /// `S_i`: the Weyl-group action on a regular crystal.
    pub fn weyl_op(&self, i: usize, el: &TensorElement) -> TensorElement {
        let k = self.pair_i(i, &self.weight(el));
        let mut cur = el.clone();
        if k >= 0 {
            for _ in 0..k {
                cur = self.f(i, &cur).expect("string long enough for the Weyl action");
            }
        } else {
            for _ in 0..(-k) {
                cur = self.e(i, &cur).expect("string long enough for the Weyl action");
            }
        }
        cur
    }

    pub fn weyl_action(&self, word: &[usize], el: &TensorElement) -> TensorElement {
        let mut cur = el.clone();
        for &i in word.iter().rev() {
            cur = self.weyl_op(i, &cur);
        }
        cur
    }

    /// Extremality by breadth-first search over the Weyl orbit of the
    /// element, checking the string-end condition at every visited state.
    pub fn is_extremal(&self, el: &TensorElement) -> Result<bool> {
        let wt = self.weight(el);
        let orbit = classical_orbit(&self.datum, &wt);
        let cap = 10 * orbit.len().max(1) + 10;
        let mut visited = BTreeSet::new();
        let mut queue = VecDeque::new();
        visited.insert(el.clone());
        queue.push_back(el.clone());
        while let Some(cur) = queue.pop_front() {
            let w = self.weight(&cur);
            for i in 0..=self.datum.rank {
                let pair = self.pair_i(i, &w);
                if pair >= 0 && self.e(i, &cur).is_some() {
                    return Ok(false);
                }
                if pair <= 0 && self.f(i, &cur).is_some() {
                    return Ok(false);
                }
                let next = self.weyl_op(i, &cur);
                if visited.insert(next.clone()) {
                    if visited.len() > cap {
                        return Err(Error::domain("extremality search exceeded its orbit cap"));
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(true)
    }

    /// Partition of the element set into connected components under all
    /// `e_i`/`f_i`, `i` in `I`.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.elements.len()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for start in 0..self.elements.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([start]);
            comp[start] = id;
            while let Some(k) = queue.pop_front() {
                members.push(k);
                let el = &self.elements[k];
                for i in 0..=self.datum.rank {
                    for img in [self.f(i, el), self.e(i, el)].into_iter().flatten() {
                        let j = self.index_of(&img).expect("operators stay inside the crystal");
                        if comp[j] == usize::MAX {
                            comp[j] = id;
                            queue.push_back(j);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// DOT rendering of the crystal graph with edges labeled by the node.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph crystal {\n  rankdir=TB;\n");
        for el in &self.elements {
            s.push_str(&format!("  \"{el}\";\n"));
        }
        for el in &self.elements {
            for i in 0..=self.datum.rank {
                if let Some(img) = self.f(i, el) {
                    s.push_str(&format!("  \"{el}\" -> \"{img}\" [label=\"{i}\"];\n"));
                }
            }
        }
        s.push_str("}\n");
        s
    }

    /// Listing of elements with weights, deterministic order.
    pub fn to_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .elements
            .iter()
            .map(|el| {
                let w = self.weight(el);
                serde_json::json!({
                    "element": el.to_string(),
                    "weight": w.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "lambda": self.lambda,
            "size": self.len(),
            "elements": items,
        })
    }
}

/// Report of the simple-crystal checks for one fundamental crystal.
#[derive(Debug, serde::Serialize)]
pub struct SimpleCrystalReport {
    pub node: usize,
    pub size: usize,
    pub unique_leading_weight_element: bool,
    pub extremal_weights_in_orbit: bool,
    pub weight_support_matches_hull: bool,
}

impl SimpleCrystalReport {
    pub fn passed(&self) -> bool {
        self.unique_leading_weight_element && self.extremal_weights_in_orbit && self.weight_support_matches_hull
    }
}

/// e-coordinates of an `A_n` classical weight, normalized to total `total`.
fn e_coords(datum: &RootDatum, w: &ClWeight, total: i64) -> Option<Vec<i64>> {
    let n = datum.rank;
    let mut pair = Vec::with_capacity(n);
    for i in 1..=n {
        let p = datum.cl_coroot_pair(i, w);
        if !p.is_integer() {
            return None;
        }
        pair.push(i64::try_from(p.to_integer()).ok()?);
    }
    // x_1 free, x_{j+1} = x_j - pair_j; fix the sum.
    let mut x = vec![0i64; n + 1];
    for j in 1..=n {
        x[j] = x[j - 1] - pair[j - 1];
    }
    let sum: i64 = x.iter().sum();
    let shift_num = total - sum;
    if shift_num % (n as i64 + 1) != 0 {
        return None;
    }
    let shift = shift_num / (n as i64 + 1);
    for v in &mut x {
        *v += shift;
    }
    Some(x)
}

fn majorized_by(x: &[i64], y: &[i64]) -> bool {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_unstable_by(|a, b| b.cmp(a));
    ys.sort_unstable_by(|a, b| b.cmp(a));
    let mut px = 0i64;
    let mut py = 0i64;
    for (a, b) in xs.iter().zip(&ys) {
        px += a;
        py += b;
        if px > py {
            return false;
        }
    }
    px == py
}

/// Verify the simple-crystal facts for `B(W(varpi_i))`: unique element of
/// the leading classical weight, extremal weights inside the classical
/// orbit, and weight support equal to the lattice points of the orbit hull
/// in the right coset.
pub fn simple_crystal_check(datum: &Arc<RootDatum>, node: usize) -> Result<SimpleCrystalReport> {
    require_type_a(datum)?;
    let n = datum.rank;
    if !(1..=n).contains(&node) {
        return Err(Error::domain(format!("node must lie in 1..={n}")));
    }
    let mut lambda = vec![0i64; n];
    lambda[node - 1] = 1;
    let crystal = TensorCrystal::build(datum, &lambda)?;
    let varpi = datum.cl_project(&Weight::level_zero_fundamental(datum, node));
    let orbit = classical_orbit(datum, &varpi);

    let leading_count = crystal.elements.iter().filter(|el| crystal.weight(el) == varpi).count();

    let mut extremal_ok = true;
    for el in &crystal.elements {
        if crystal.is_extremal(el)? && !orbit.contains(&crystal.weight(el)) {
            extremal_ok = false;
        }
    }

    // Weight support vs hull-and-coset lattice points, in e-coordinates.
    let total = node as i64;
    let target = e_coords(datum, &varpi, total).expect("fundamental weight has integral coordinates");
    let support: BTreeSet<Vec<i64>> = crystal
        .elements
        .iter()
        .map(|el| e_coords(datum, &crystal.weight(el), total).expect("crystal weights are integral"))
        .collect();
    let mut lattice = BTreeSet::new();
    // Majorization forces entries between min and max of the target.
    let lo = *target.iter().min().unwrap();
    let hi = *target.iter().max().unwrap();
    fn enumerate_points(
        pos: usize,
        len: usize,
        lo: i64,
        hi: i64,
        remaining: i64,
        acc: &mut Vec<i64>,
        target: &[i64],
        out: &mut BTreeSet<Vec<i64>>,
    ) {
        if pos == len {
            if remaining == 0 && majorized_by(acc, target) {
                out.insert(acc.clone());
            }
            return;
        }
        for v in lo..=hi {
            acc.push(v);
            enumerate_points(pos + 1, len, lo, hi, remaining - v, acc, target, out);
            acc.pop();
        }
    }
    enumerate_points(0, n + 1, lo, hi, total, &mut Vec::new(), &target, &mut lattice);

    Ok(SimpleCrystalReport {
        node,
        size: crystal.len(),
        unique_leading_weight_element: leading_count == 1,
        extremal_weights_in_orbit: extremal_ok,
        weight_support_matches_hull: support == lattice,
    })
}

/// Character symmetry: the multiset of weights is invariant under every
/// classical reflection.
pub fn weights_are_weyl_symmetric(crystal: &TensorCrystal) -> bool {
    let datum = crystal.datum();
    let mut counts: BTreeMap<Vec<BigRational>, i64> = BTreeMap::new();
    for el in &crystal.elements {
        *counts.entry(crystal.weight(el).coords).or_insert(0) += 1;
    }
    for i in 1..=datum.rank {
        for (coords, c) in &counts {
            let img = datum.cl_reflect(i, &ClWeight { coords: coords.clone() });
            if counts.get(&img.coords) != Some(c) {
                return false;
            }
        }
    }
    true
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut c = 1usize;
    for j in 0..k {
        c = c * (n - j) / (j + 1);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build_root_datum, AffineType};

    fn datum(n: usize) -> Arc<RootDatum> {
        build_root_datum(AffineType::parse(&format!("A{n}~1")).unwrap()).unwrap()
    }

    fn col(v: &[u8]) -> ColumnElement {
        ColumnElement::new(v.to_vec())
    }

    #[test]
    fn column_operators_fundamental_vector_rep() {
        let d = datum(2);
        let lambda = vec![1, 0];
        let b = TensorCrystal::build(&d, &lambda).unwrap();
        assert_eq!(b.len(), 3);
        let one = TensorElement { factors: vec![col(&[1])] };
        let two = TensorElement { factors: vec![col(&[2])] };
        let three = TensorElement { factors: vec![col(&[3])] };
        assert_eq!(b.f(1, &one), Some(two.clone()));
        assert_eq!(b.f(2, &two), Some(three.clone()));
        assert_eq!(b.f(0, &three), Some(one.clone()));
        assert_eq!(b.f(1, &two), None);
        // Weight bookkeeping: wt(f_0 b) = wt(b) - cl(alpha_0).
        let delta_drop = b.weight(&one).sub(&b.weight(&three));
        let cl_alpha0 = d.cl_of_root(&crate::rootdata::Root::simple(2, 0));
        assert_eq!(delta_drop, cl_alpha0.neg());
    }

    #[test]
    fn tensor_rule_orientation() {
        // n = 1, lambda = 2 varpi_1: f_1 acts on the right factor first.
        let d = datum(1);
        let b = TensorCrystal::build(&d, &[2]).unwrap();
        let hw = b.leading_element();
        let img = b.f(1, &hw).unwrap();
        assert_eq!(img.factors, vec![col(&[1]), col(&[2])]);
    }

    #[test]
    fn axiom_suite() {
        for (n, lambda) in [(1usize, vec![2i64]), (2, vec![1, 1]), (3, vec![1, 0, 1])] {
            let d = datum(n);
            let b = TensorCrystal::build(&d, &lambda).unwrap();
            for el in &b.elements {
                for i in 0..=n {
                    if let Some(img) = b.f(i, el) {
                        assert_eq!(b.e(i, &img).as_ref(), Some(el), "e_i f_i = id where defined");
                    }
                    if let Some(img) = b.e(i, el) {
                        assert_eq!(b.f(i, &img).as_ref(), Some(el), "f_i e_i = id where defined");
                    }
                    // eps/phi are string lengths.
                    let mut up = 0;
                    let mut cur = el.clone();
                    while let Some(x) = b.e(i, &cur) {
                        cur = x;
                        up += 1;
                    }
                    assert_eq!(up, b.eps(i, el), "eps_{i} on {el}");
                    let mut down = 0;
                    let mut cur = el.clone();
                    while let Some(x) = b.f(i, &cur) {
                        cur = x;
                        down += 1;
                    }
                    assert_eq!(down, b.phi(i, el), "phi_{i} on {el}");
                    // phi - eps = <h_i, wt>.
                    let pair = d.cl_coroot_pair(i, &b.weight(el));
                    assert_eq!(
                        BigRational::from_integer((b.phi(i, el) - b.eps(i, el)).into()),
                        pair
                    );
                }
            }
            assert!(weights_are_weyl_symmetric(&b));
        }
    }

    #[test]
    fn sizes_and_connectivity() {
        for n in 1..=3usize {
            let d = datum(n);
            for i in 1..=n {
                let mut lambda = vec![0i64; n];
                lambda[i - 1] = 1;
                let b = TensorCrystal::build(&d, &lambda).unwrap();
                assert_eq!(b.len(), binomial(n + 1, i));
            }
        }
        // n=3, lambda = varpi_1 + varpi_2: size 4 * 6 = 24, connected.
        let d = datum(3);
        let b = TensorCrystal::build(&d, &[1, 1, 0]).unwrap();
        assert_eq!(b.len(), 24);
        assert_eq!(b.connected_components().len(), 1);
    }

    #[test]
    fn extremality_small() {
        let d = datum(1);
        let b = TensorCrystal::build(&d, &[2]).unwrap();
        let hw = b.leading_element();
        assert!(b.is_extremal(&hw).unwrap());
        // The weight-zero element on the long classical string (f_1 of the
        // leading element) is not extremal; the singlet {2}x{1} is not
        // extremal either once affine operators act.
        let mid = b.f(1, &hw).unwrap();
        assert!(!b.is_extremal(&mid).unwrap());
        let mut extremal_count = 0;
        for el in &b.elements {
            if b.is_extremal(el).unwrap() {
                extremal_count += 1;
            }
        }
        assert_eq!(extremal_count, 2, "the leading and lowest elements only");
    }

    #[test]
    fn fundamental_crystals_are_simple() {
        for n in 1..=3usize {
            let d = datum(n);
            for i in 1..=n {
                let rep = simple_crystal_check(&d, i).unwrap();
                assert!(rep.passed(), "A{n}~1 node {i}: {rep:?}");
            }
        }
    }

    #[test]
    fn affinization_bookkeeping() {
        let d = datum(2);
        let b = TensorCrystal::build(&d, &[1, 1]).unwrap();
        let start = AffineElement {
            base: b.leading_element(),
            z_exponents: vec![0; 2],
        };
        // cl(weight) is unchanged by exponent shifts and e_0/f_0 project to
        // the base operators.
        let mut cur = start.clone();
        for step in 0..40 {
            let i = step % 3;
            match b.f_aff(i, &cur) {
                Some(next) => {
                    assert_eq!(b.f(i, &cur.base).unwrap(), next.base);
                    if i != 0 {
                        assert_eq!(cur.z_exponents, next.z_exponents);
                    } else {
                        let diff: i64 = cur
                            .z_exponents
                            .iter()
                            .zip(&next.z_exponents)
                            .map(|(a, b)| (a - b).abs())
                            .sum();
                        assert_eq!(diff, 1);
                    }
                    cur = next;
                }
                None => break,
            }
        }
    }

    #[test]
    fn rejects_non_type_a() {
        let d = build_root_datum(AffineType::parse("C2~1").unwrap()).unwrap();
        assert!(TensorCrystal::build(&d, &[1, 0]).is_err());
    }

    #[test]
    fn dot_export_contains_labeled_edges() {
        let d = datum(1);
        let b = TensorCrystal::build(&d, &[1]).unwrap();
        let dot = b.to_dot();
        assert!(dot.contains("digraph crystal"));
        assert!(dot.contains("label=\"1\""));
        assert!(dot.contains("label=\"0\""));
    }
}
