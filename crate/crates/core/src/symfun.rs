//! Partitions, Schur and Laurent-Schur functions for `GL_m`,
//! Littlewood-Richardson multiplication with an independent brute-force
//! oracle, Pieri rules, duality, and products over `prod_i GL_{lambda_i}`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Partition: weakly decreasing positive parts, canonical (no trailing
/// zeros).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        parts.retain(|&p| p != 0);
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("partition parts must be weakly decreasing"));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Conjugate partition; an involution.
    pub fn transpose(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let parts = (0..cols)
            .map(|c| self.parts.iter().filter(|&&p| p as usize > c).count() as u32)
            .collect();
        Partition { parts }
    }

    /// All partitions of total size `n`.
    pub fn all_of_size(n: u64) -> Vec<Partition> {
        fn rec(remaining: u64, max: u64, acc: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition { parts: acc.clone() });
                return;
            }
            let mut p = remaining.min(max);
            while p >= 1 {
                acc.push(p as u32);
                rec(remaining - p, p, acc, out);
                acc.pop();
                p -= 1;
            }
        }
        let mut out = Vec::new();
        rec(n, n.max(1), &mut Vec::new(), &mut out);
        if n == 0 {
            out = vec![Partition::empty()];
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Irreducible `GL_m` representation as a Laurent-Schur function: a weakly
/// decreasing integer shape of length `m`. `m = 0` carries only the trivial
/// representation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaurentSchur {
    pub m: usize,
    shape: Vec<i64>,
}

impl LaurentSchur {
    pub fn new(m: usize, shape: Vec<i64>) -> Result<Self> {
        if shape.len() != m {
            return Err(Error::domain(format!(
                "shape length {} does not match GL_{m}",
                shape.len()
            )));
        }
        if shape.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("shape must be weakly decreasing"));
        }
        Ok(LaurentSchur { m, shape })
    }

    pub fn trivial(m: usize) -> Self {
        LaurentSchur { m, shape: vec![0; m] }
    }

    pub fn shape(&self) -> &[i64] {
        &self.shape
    }

    pub fn is_trivial(&self) -> bool {
        self.shape.iter().all(|&s| s == 0)
    }

    /// Factor into a polynomial partition plus a determinant power.
    pub fn factor(&self) -> (Partition, i64) {
        let det = self.shape.last().copied().unwrap_or(0);
        let parts = self
            .shape
            .iter()
            .map(|&s| u32::try_from(s - det).expect("shape spans fit u32"))
            .collect::<Vec<_>>();
        (Partition::new(parts).expect("factored shape is a partition"), det)
    }

    pub fn from_partition(m: usize, p: &Partition, det: i64) -> Result<Self> {
        if p.len() > m {
            return Err(Error::domain(format!("partition {} too long for GL_{m}", p)));
        }
        let shape = (0..m).map(|i| p.part(i) as i64 + det).collect();
        LaurentSchur::new(m, shape)
    }

    /// Total number of boxes of the polynomial part.
    pub fn boxes(&self) -> u64 {
        self.factor().0.size()
    }

    pub fn det_power(&self) -> i64 {
        self.factor().1
    }

    /// Dual representation: reverse and negate the shape.
    pub fn dual(&self) -> LaurentSchur {
        let mut shape: Vec<i64> = self.shape.iter().map(|&s| -s).collect();
        shape.reverse();
        LaurentSchur { m: self.m, shape }
    }

    /// Weyl dimension formula for `GL_m`.
    pub fn dimension(&self) -> BigInt {
        let m = self.m;
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for i in 0..m {
            for j in (i + 1)..m {
                num *= BigInt::from(self.shape[i] - self.shape[j] + (j as i64 - i as i64));
                den *= BigInt::from(j as i64 - i as i64);
            }
        }
        num / den
    }
}

impl fmt::Display for LaurentSchur {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, s) in self.shape.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// Formal non-negative-integer combination of `GL_m` irreducibles.
pub type SchurSum = BTreeMap<LaurentSchur, u64>;

/// Littlewood-Richardson coefficients `c^nu_{lambda mu}` for partitions with
/// at most `max_rows` rows: skew semistandard fillings of `nu/lambda` with
/// content `mu` whose reverse reading word is a lattice word.
fn lr_coefficients(lambda: &Partition, mu: &Partition, max_rows: usize) -> BTreeMap<Partition, u64> {
    let total = lambda.size() + mu.size();
    let mut out: BTreeMap<Partition, u64> = BTreeMap::new();
    // Enumerate candidate outer shapes nu.
    let rows = max_rows.min((lambda.len() + mu.len()).max(1));
    fn shapes(total: u64, rows: usize, min_next: u64, inner: &Partition, acc: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if acc.len() == rows {
            if total == 0 {
                out.push(Partition::new(acc.clone()).unwrap());
            }
            return;
        }
        let i = acc.len();
        let lo = inner.part(i) as u64;
        let hi = min_next.min(total + lo);
        let mut p = hi;
        loop {
            if p >= lo {
                acc.push(p as u32);
                shapes(total - (p - lo), rows, p, inner, acc, out);
                acc.pop();
            } else {
                break;
            }
            if p == 0 {
                break;
            }
            p -= 1;
        }
    }
    let mut candidates = Vec::new();
    shapes(mu.size(), rows, total, lambda, &mut Vec::new(), &mut candidates);
    for nu in candidates {
        let c = lr_fillings(lambda, mu, &nu);
        if c > 0 {
            out.insert(nu, c);
        }
    }
    out
}

/// Number of LR fillings of `nu/lambda` with content `mu`.
fn lr_fillings(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if nu.size() != lambda.size() + mu.size() {
        return 0;
    }
    for i in 0..nu.len().max(lambda.len()) {
        if nu.part(i) < lambda.part(i) {
            return 0;
        }
    }
    let rows = nu.len();
    // Fill the skew cells row by row, left to right within a row... the
    // lattice condition is checked on the reverse reading word (right to
    // left, top to bottom), so fill in exactly that reading order.
    // Cells in reading order: for each row from top, columns from right to
    // left over the skew part.
    let mut cells = Vec::new();
    for r in 0..rows {
        let lo = lambda.part(r) as usize;
        let hi = nu.part(r) as usize;
        for c in (lo..hi).rev() {
            cells.push((r, c));
        }
    }
    let mut grid: Vec<Vec<u32>> = (0..rows).map(|r| vec![0; nu.part(r) as usize]).collect();
    let mut counts = vec![0u32; mu.len()];
    fn rec(
        idx: usize,
        cells: &[(usize, usize)],
        grid: &mut Vec<Vec<u32>>,
        counts: &mut Vec<u32>,
        lambda: &Partition,
        mu: &Partition,
        total: &mut u64,
    ) {
        if idx == cells.len() {
            *total += 1;
            return;
        }
        let (r, c) = cells[idx];
        for v in 1..=mu.len() as u32 {
            // Content bound.
            if counts[(v - 1) as usize] as u64 >= mu.part((v - 1) as usize) as u64 {
                continue;
            }
            // Lattice condition on the prefix: after placing v, the count of
            // v must not exceed the count of v-1.
            if v > 1 && counts[(v - 1) as usize] + 1 > counts[(v - 2) as usize] {
                continue;
            }
            // Rows weakly increase left to right.
            let right_ok = if c + 1 < grid[r].len() {
                let right = grid[r][c + 1];
                right == 0 || v <= right
            } else {
                true
            };
            if !right_ok {
                continue;
            }
            // Left neighbour (inside lambda counts as empty).
            if c > lambda.part(r) as usize {
                let left = grid[r][c - 1];
                if left != 0 && left > v {
                    continue;
                }
            }
            // Columns strictly increase top to bottom.
            if r > 0 && (c as u32) < nu_part_row(grid, r - 1) {
                let up = grid[r - 1][c];
                if up != 0 && up >= v {
                    continue;
                }
                // Cells above inside lambda are "empty": strictness cannot be
                // checked yet if up == 0, but reading order fills upper rows
                // first, so up == 0 means the cell is inside lambda.
                if up == 0 && c >= lambda.part(r - 1) as usize {
                    unreachable!("upper skew cells fill before lower rows");
                }
            }
            grid[r][c] = v;
            counts[(v - 1) as usize] += 1;
            rec(idx + 1, cells, grid, counts, lambda, mu, total);
            counts[(v - 1) as usize] -= 1;
            grid[r][c] = 0;
        }
    }
    fn nu_part_row(grid: &[Vec<u32>], r: usize) -> u32 {
        grid[r].len() as u32
    }
    let mut total = 0u64;
    rec(0, &cells, &mut grid, &mut counts, lambda, mu, &mut total);
    total
}

/// Tensor product decomposition of two `GL_m` irreducibles via the LR rule,
/// after factoring out determinant powers.
pub fn lr_multiply(a: &LaurentSchur, b: &LaurentSchur) -> Result<SchurSum> {
    if a.m != b.m {
        return Err(Error::domain(format!("GL rank mismatch: {} vs {}", a.m, b.m)));
    }
    let m = a.m;
    if m == 0 {
        let mut out = SchurSum::new();
        out.insert(LaurentSchur::trivial(0), 1);
        return Ok(out);
    }
    let (pa, da) = a.factor();
    let (pb, db) = b.factor();
    let mut out = SchurSum::new();
    for (nu, c) in lr_coefficients(&pa, &pb, m) {
        let s = LaurentSchur::from_partition(m, &nu, da + db)?;
        out.insert(s, c);
    }
    // Dimension check: tensor product dimension is preserved.
    debug_assert_eq!(
        {
            let mut total = BigInt::zero();
            for (s, c) in &out {
                total += s.dimension() * BigInt::from(*c);
            }
            total
        },
        a.dimension() * b.dimension()
    );
    Ok(out)
}

/// Multiplication by the k-th elementary symmetric function: add vertical
/// k-strips.
pub fn pieri_vertical(a: &LaurentSchur, k: usize) -> Result<SchurSum> {
    if k > a.m {
        return Err(Error::domain(format!("e_{k} vanishes on GL_{}", a.m)));
    }
    let m = a.m;
    let mut out = SchurSum::new();
    // Choose k rows to increment, keeping the shape weakly decreasing.
    let idxs: Vec<usize> = (0..m).collect();
    fn rec(
        start: usize,
        left: usize,
        idxs: &[usize],
        chosen: &mut Vec<usize>,
        base: &[i64],
        out: &mut SchurSum,
    ) {
        if left == 0 {
            let mut shape = base.to_vec();
            for &i in chosen.iter() {
                shape[i] += 1;
            }
            if shape.windows(2).all(|w| w[0] >= w[1]) {
                let s = LaurentSchur::new(shape.len(), shape).unwrap();
                *out.entry(s).or_insert(0) += 1;
            }
            return;
        }
        for pos in start..idxs.len() {
            chosen.push(idxs[pos]);
            rec(pos + 1, left - 1, idxs, chosen, base, out);
            chosen.pop();
        }
    }
    rec(0, k, &idxs, &mut Vec::new(), a.shape(), &mut out);
    // Vertical strips added to a valid shape are automatically multiplicity
    // free; keep only multiplicity-1 entries.
    for v in out.values() {
        debug_assert_eq!(*v, 1);
    }
    Ok(out)
}

/// Monomial expansion of a Laurent-Schur function: exponent vector ->
/// multiplicity, over semistandard fillings.
fn monomial_expansion(s: &LaurentSchur) -> BTreeMap<Vec<i64>, BigInt> {
    let (p, det) = s.factor();
    let m = s.m;
    let mut out: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
    // Semistandard tableaux of shape p with entries in 1..=m.
    let rows = p.len();
    let mut grid: Vec<Vec<u32>> = (0..rows).map(|r| vec![0; p.part(r) as usize]).collect();
    fn rec(r: usize, c: usize, m: usize, grid: &mut Vec<Vec<u32>>, out: &mut BTreeMap<Vec<i64>, BigInt>, det: i64) {
        if r == grid.len() {
            let mut expo = vec![det; m];
            for row in grid.iter() {
                for &v in row {
                    expo[(v - 1) as usize] += 1;
                }
            }
            *out.entry(expo).or_insert_with(BigInt::zero) += 1;
            return;
        }
        let (nr, nc) = if c + 1 < grid[r].len() { (r, c + 1) } else { (r + 1, 0) };
        let lo = {
            let mut lo = 1u32;
            if c > 0 {
                lo = lo.max(grid[r][c - 1]);
            }
            if r > 0 && c < grid[r - 1].len() {
                lo = lo.max(grid[r - 1][c] + 1);
            }
            lo
        };
        for v in lo..=m as u32 {
            grid[r][c] = v;
            rec(nr, nc, m, grid, out, det);
            grid[r][c] = 0;
        }
    }
    if rows == 0 {
        out.insert(vec![det; m], BigInt::one());
    } else {
        rec(0, 0, m, &mut grid, &mut out, det);
    }
    out
}

/// Brute-force oracle: expand both factors into monomials, multiply, and
/// greedily peel off dominant shapes. Guarded to small inputs.
pub fn oracle_multiply(a: &LaurentSchur, b: &LaurentSchur) -> Result<SchurSum> {
    if a.m != b.m {
        return Err(Error::domain(format!("GL rank mismatch: {} vs {}", a.m, b.m)));
    }
    if a.boxes() + b.boxes() > 8 {
        return Err(Error::domain("oracle size guard exceeded (total boxes > 8)"));
    }
    if a.m == 0 {
        let mut out = SchurSum::new();
        out.insert(LaurentSchur::trivial(0), 1);
        return Ok(out);
    }
    let ma = monomial_expansion(a);
    let mb = monomial_expansion(b);
    let mut prod: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
    for (ea, ca) in &ma {
        for (eb, cb) in &mb {
            let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *prod.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    let mut out = SchurSum::new();
    while let Some((expo, coeff)) = prod
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .filter(|(e, _)| e.windows(2).all(|w| w[0] >= w[1]))
        .max_by(|(e1, _), (e2, _)| e1.cmp(e2))
        .map(|(e, c)| (e.clone(), c.clone()))
    {
        let mult = u64::try_from(coeff.clone()).map_err(|_| Error::domain("negative multiplicity in oracle"))?;
        let s = LaurentSchur::new(a.m, expo)?;
        for (e, c) in monomial_expansion(&s) {
            let entry = prod.entry(e).or_insert_with(BigInt::zero);
            *entry -= c * BigInt::from(mult);
        }
        out.insert(s, mult);
    }
    if prod.values().any(|c| !c.is_zero()) {
        return Err(Error::domain("oracle residue is not Schur-positive"));
    }
    Ok(out)
}

/// Irreducible representation of `prod_i GL_{lambda_i}`: one Laurent-Schur
/// component per classical node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GProdRep {
    pub components: Vec<LaurentSchur>,
}

impl GProdRep {
    pub fn trivial(lambda: &[usize]) -> Self {
        GProdRep { components: lambda.iter().map(|&m| LaurentSchur::trivial(m)).collect() }
    }

    pub fn new(components: Vec<LaurentSchur>) -> Self {
        GProdRep { components }
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(LaurentSchur::is_trivial)
    }

    pub fn dual(&self) -> GProdRep {
        GProdRep { components: self.components.iter().map(LaurentSchur::dual).collect() }
    }

    pub fn boxes(&self) -> u64 {
        self.components.iter().map(LaurentSchur::boxes).sum()
    }

    pub fn max_abs_det(&self) -> i64 {
        self.components.iter().map(|c| c.det_power().abs()).max().unwrap_or(0)
    }

    /// Componentwise tensor decomposition with multiplicities multiplied.
    pub fn multiply(&self, other: &GProdRep) -> Result<BTreeMap<GProdRep, u64>> {
        if self.components.len() != other.components.len() {
            return Err(Error::domain("component count mismatch"));
        }
        let mut acc: Vec<(Vec<LaurentSchur>, u64)> = vec![(Vec::new(), 1)];
        for (a, b) in self.components.iter().zip(&other.components) {
            let prod = lr_multiply(a, b)?;
            let mut next = Vec::new();
            for (prefix, mult) in &acc {
                for (s, c) in &prod {
                    let mut p = prefix.clone();
                    p.push(s.clone());
                    next.push((p, mult * c));
                }
            }
            acc = next;
        }
        let mut out = BTreeMap::new();
        for (comps, mult) in acc {
            *out.entry(GProdRep { components: comps }).or_insert(0) += mult;
        }
        Ok(out)
    }

    /// `GL_lambda` irreducibles within a truncation window: polynomial boxes
    /// at most `max_boxes` and determinant exponents bounded by `max_det` in
    /// absolute value.
    pub fn enumerate(lambda: &[usize], max_boxes: u64, max_det: i64) -> Vec<GProdRep> {
        fn components(m: usize, max_boxes: u64, max_det: i64) -> Vec<LaurentSchur> {
            if m == 0 {
                return vec![LaurentSchur::trivial(0)];
            }
            let mut out = Vec::new();
            for boxes in 0..=max_boxes {
                for p in Partition::all_of_size(boxes) {
                    if p.len() > m {
                        continue;
                    }
                    // Skip shapes whose polynomial part is not reduced (a
                    // full column of m boxes is a determinant).
                    if p.len() == m && m > 0 {
                        continue;
                    }
                    for det in -max_det..=max_det {
                        out.push(LaurentSchur::from_partition(m, &p, det).unwrap());
                    }
                }
            }
            out
        }
        let mut acc: Vec<Vec<LaurentSchur>> = vec![Vec::new()];
        for &m in lambda {
            let opts = components(m, max_boxes, max_det);
            let mut next = Vec::new();
            for prefix in &acc {
                for o in &opts {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    next.push(p);
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|components| GProdRep { components })
            .filter(|g| g.boxes() <= max_boxes)
            .collect()
    }
}

impl fmt::Display for GProdRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Total content (sum over components of shape entries weighted by node) as
/// an exact rational vector; used for bookkeeping checks only.
pub fn rep_content(g: &GProdRep) -> Vec<BigRational> {
    g.components
        .iter()
        .map(|c| BigRational::from_integer(BigInt::from(c.shape().iter().sum::<i64>())))
        .collect()
}
