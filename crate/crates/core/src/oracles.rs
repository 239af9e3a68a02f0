//! Independent combinatorial ground truth.
//!
//! Two enumeration strategies are kept for each counting problem: a plain
//! set-based search over order ideals, and a faster memoized recursion.  The
//! pair must agree; the fast one feeds the verification scenarios.  The
//! rational invariant values of the local product formulas live here too, so
//! the crossing engine can be checked against numbers that never touched it.

use crate::error::{Error, Result};
use crate::exact::{rat, rat_int, sign_pow, Rat};
use crate::series::ConeSeries;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

/// Largest argument accepted by [`count_plane_partitions`].
pub const PLANE_PARTITION_LIMIT: usize = 14;

/// Largest stone budget accepted by [`count_pyramid_partitions`].
pub const PYRAMID_STONE_LIMIT: u32 = 12;

/// Sum of squared divisors of `n > 0`.
pub fn sigma2(n: i64) -> i64 {
    assert!(n > 0, "sigma2 needs a positive argument, got {n}");
    (1..=n).filter(|d| n % d == 0).map(|d| d * d).sum()
}

// ---------------------------------------------------------------------------
// Plane partitions.

/// Number of plane partitions of `n`: finite order ideals of the octant
/// lattice with `n` elements.
pub fn count_plane_partitions(n: usize) -> Result<u64> {
    if n > PLANE_PARTITION_LIMIT {
        return Err(Error::Range(format!(
            "plane partition table capped at {PLANE_PARTITION_LIMIT}, got {n}"
        )));
    }
    let mut memo = HashMap::new();
    let open = vec![n as u32; n];
    Ok(plane_under(n as u32, &open, &mut memo))
}

/// Table `0..=limit` of plane partition counts.
pub fn plane_partition_table(limit: usize) -> Result<Vec<u64>> {
    if limit > PLANE_PARTITION_LIMIT {
        return Err(Error::Range(format!(
            "plane partition table capped at {PLANE_PARTITION_LIMIT}, got {limit}"
        )));
    }
    (0..=limit).map(count_plane_partitions).collect()
}

/// Plane partitions of `budget` whose first row fits under `prev`
/// (entrywise, shorter or equal length).
fn plane_under(budget: u32, prev: &[u32], memo: &mut HashMap<(u32, Vec<u32>), u64>) -> u64 {
    if budget == 0 {
        return 1;
    }
    if prev.is_empty() {
        return 0;
    }
    let key = (budget, prev.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for row in rows_under(prev, budget) {
        let used: u32 = row.iter().sum();
        total += plane_under(budget - used, &row, memo);
    }
    memo.insert(key, total);
    total
}

/// Nonempty weakly decreasing rows bounded entrywise by `prev` with sum at
/// most `budget`.
fn rows_under(prev: &[u32], budget: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut row = Vec::new();
    fn rec(prev: &[u32], budget: u32, row: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !row.is_empty() {
            out.push(row.clone());
        }
        let i = row.len();
        if i >= prev.len() {
            return;
        }
        let mut cap = prev[i].min(budget);
        if i > 0 {
            cap = cap.min(row[i - 1]);
        }
        for v in 1..=cap {
            row.push(v);
            rec(prev, budget - v, row, out);
            row.pop();
        }
    }
    rec(prev, budget, &mut row, &mut out);
    out
}

/// Baseline: breadth-first enumeration of octant order ideals as explicit
/// box sets, deduplicated.  Returns counts for sizes `0..=limit`.
pub fn plane_partition_table_baseline(limit: usize) -> Result<Vec<u64>> {
    if limit > PLANE_PARTITION_LIMIT {
        return Err(Error::Range(format!(
            "plane partition table capped at {PLANE_PARTITION_LIMIT}, got {limit}"
        )));
    }
    let mut counts = vec![0u64; limit + 1];
    let mut seen: HashSet<Vec<(u8, u8, u8)>> = HashSet::new();
    let mut frontier: Vec<Vec<(u8, u8, u8)>> = vec![Vec::new()];
    seen.insert(Vec::new());
    counts[0] = 1;
    for size in 1..=limit {
        let mut next = Vec::new();
        for ideal in &frontier {
            for cand in addable_boxes(ideal) {
                let mut grown = ideal.clone();
                let pos = grown.binary_search(&cand).unwrap_err();
                grown.insert(pos, cand);
                if seen.insert(grown.clone()) {
                    counts[size] += 1;
                    next.push(grown);
                }
            }
        }
        frontier = next;
    }
    Ok(counts)
}

/// Boxes whose three lattice predecessors already lie in the ideal.
fn addable_boxes(ideal: &[(u8, u8, u8)]) -> Vec<(u8, u8, u8)> {
    let member = |c: &(u8, u8, u8)| ideal.binary_search(c).is_ok();
    let closed = |c: (u8, u8, u8)| {
        (c.0 == 0 || member(&(c.0 - 1, c.1, c.2)))
            && (c.1 == 0 || member(&(c.0, c.1 - 1, c.2)))
            && (c.2 == 0 || member(&(c.0, c.1, c.2 - 1)))
    };
    let mut cands: Vec<(u8, u8, u8)> = vec![(0, 0, 0)];
    for &(x, y, z) in ideal {
        cands.push((x + 1, y, z));
        cands.push((x, y + 1, z));
        cands.push((x, y, z + 1));
    }
    cands.sort_unstable();
    cands.dedup();
    cands.retain(|c| !member(c) && closed(*c));
    cands
}

// ---------------------------------------------------------------------------
// Pyramid partitions (length one).

/// One stone of the length-one pyramid arrangement.
///
/// White layers `2j - 1` form a `j x j` grid, black layers `2j` a
/// `j x (j + 1)` grid.  A white stone covers the two black stones at
/// `b`-offsets 0 and 1 in the next layer; a black stone covers the two white
/// stones at `a`-offsets 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stone {
    pub layer: u32,
    pub a: u8,
    pub b: u8,
}

impl Stone {
    pub fn is_white(&self) -> bool {
        self.layer % 2 == 1
    }

    /// Grid dimensions `(a_size, b_size)` of a layer.
    pub fn layer_dims(layer: u32) -> (u8, u8) {
        assert!(layer >= 1);
        if layer % 2 == 1 {
            let j = ((layer + 1) / 2) as u8;
            (j, j)
        } else {
            let j = (layer / 2) as u8;
            (j, j + 1)
        }
    }

    /// Stones of the previous layer covering this one.  Empty only for the
    /// apex.
    pub fn parents(&self) -> Vec<Stone> {
        let mut out = Vec::new();
        if self.layer <= 1 {
            return out;
        }
        let up = self.layer - 1;
        let (a_dim, b_dim) = Stone::layer_dims(up);
        if self.is_white() {
            if self.a < a_dim {
                out.push(Stone { layer: up, a: self.a, b: self.b });
            }
            if self.a >= 1 {
                out.push(Stone { layer: up, a: self.a - 1, b: self.b });
            }
        } else {
            if self.b < b_dim {
                out.push(Stone { layer: up, a: self.a, b: self.b });
            }
            if self.b >= 1 {
                out.push(Stone { layer: up, a: self.a, b: self.b - 1 });
            }
        }
        out
    }

    /// The two stones of the next layer covered by this one.
    pub fn children(&self) -> Vec<Stone> {
        let down = self.layer + 1;
        if self.is_white() {
            vec![
                Stone { layer: down, a: self.a, b: self.b },
                Stone { layer: down, a: self.a, b: self.b + 1 },
            ]
        } else {
            vec![
                Stone { layer: down, a: self.a, b: self.b },
                Stone { layer: down, a: self.a + 1, b: self.b },
            ]
        }
    }
}

type Bucket = BTreeMap<(u32, u32), u64>;

/// Counts of upward-closed stone sets with `w + b <= max_stones`, keyed by
/// `(white, black)` stone counts.  Memoized layer-by-layer recursion.
pub fn count_pyramid_partitions(max_stones: u32) -> Result<Bucket> {
    if max_stones > PYRAMID_STONE_LIMIT {
        return Err(Error::Range(format!(
            "pyramid stone budget capped at {PYRAMID_STONE_LIMIT}, got {max_stones}"
        )));
    }
    let mut buckets: Bucket = BTreeMap::new();
    buckets.insert((0, 0), 1);
    if max_stones >= 1 {
        let mut memo = HashMap::new();
        let below = deeper_layers(2, 1, max_stones - 1, &mut memo);
        for ((w, b), c) in below {
            *buckets.entry((w + 1, b)).or_insert(0) += c;
        }
    }
    Ok(buckets)
}

/// Extensions into layers `>= layer` given the previous layer's stones as a
/// grid bitmask, using at most `budget` further stones.
fn deeper_layers(
    layer: u32,
    prev_mask: u64,
    budget: u32,
    memo: &mut HashMap<(u32, u64, u32), Bucket>,
) -> Bucket {
    let mut base: Bucket = BTreeMap::new();
    base.insert((0, 0), 1);
    if budget == 0 || prev_mask == 0 {
        return base;
    }
    let key = (layer, prev_mask, budget);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let allowed = allowed_in_layer(layer, prev_mask);
    let mut result = base;
    let white = layer % 2 == 1;
    let mut picked: Vec<usize> = Vec::new();
    subset_rec(
        &allowed,
        0,
        budget,
        &mut picked,
        &mut |subset: &[usize]| {
            let size = subset.len() as u32;
            let mut mask = 0u64;
            for &i in subset {
                mask |= 1 << allowed[i].1;
            }
            let below = deeper_layers(layer + 1, mask, budget - size, memo);
            for ((w, b), c) in below {
                let (tw, tb) = if white { (w + size, b) } else { (w, b + size) };
                if tw + tb <= budget {
                    *result.entry((tw, tb)).or_insert(0) += c;
                }
            }
        },
    );
    memo.insert(key, result.clone());
    result
}

/// Stones of `layer` whose parents all lie in the previous layer's mask,
/// as `(stone, bit position)` pairs.
fn allowed_in_layer(layer: u32, prev_mask: u64) -> Vec<(Stone, u8)> {
    let (a_dim, b_dim) = Stone::layer_dims(layer);
    let (_, prev_b_dim) = Stone::layer_dims(layer - 1);
    let mut out = Vec::new();
    for a in 0..a_dim {
        for b in 0..b_dim {
            let stone = Stone { layer, a, b };
            let ok = stone
                .parents()
                .iter()
                .all(|p| prev_mask & (1 << (p.a * prev_b_dim + p.b)) != 0);
            if ok {
                let bit = a * b_dim + b;
                assert!(bit < 64);
                out.push((stone, bit));
            }
        }
    }
    out
}

/// Visits every nonempty subset of `allowed` with at most `budget` elements.
fn subset_rec(
    allowed: &[(Stone, u8)],
    from: usize,
    budget: u32,
    picked: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if !picked.is_empty() {
        visit(picked);
    }
    if picked.len() as u32 >= budget {
        return;
    }
    for i in from..allowed.len() {
        picked.push(i);
        subset_rec(allowed, i + 1, budget, picked, visit);
        picked.pop();
    }
}

/// Baseline: breadth-first enumeration of upward-closed stone sets as
/// explicit sorted sets, deduplicated.
pub fn count_pyramid_partitions_baseline(max_stones: u32) -> Result<Bucket> {
    if max_stones > PYRAMID_STONE_LIMIT {
        return Err(Error::Range(format!(
            "pyramid stone budget capped at {PYRAMID_STONE_LIMIT}, got {max_stones}"
        )));
    }
    let mut buckets: Bucket = BTreeMap::new();
    buckets.insert((0, 0), 1);
    let mut seen: HashSet<Vec<Stone>> = HashSet::new();
    let mut frontier: Vec<Vec<Stone>> = vec![Vec::new()];
    seen.insert(Vec::new());
    for _size in 1..=max_stones {
        let mut next = Vec::new();
        for ideal in &frontier {
            for cand in addable_stones(ideal) {
                let mut grown = ideal.clone();
                let pos = grown.binary_search(&cand).unwrap_err();
                grown.insert(pos, cand);
                if seen.insert(grown.clone()) {
                    let w = grown.iter().filter(|s| s.is_white()).count() as u32;
                    let b = grown.len() as u32 - w;
                    *buckets.entry((w, b)).or_insert(0) += 1;
                    next.push(grown);
                }
            }
        }
        frontier = next;
    }
    Ok(buckets)
}

/// Stones not in the ideal whose parents all are.
fn addable_stones(ideal: &[Stone]) -> Vec<Stone> {
    let member = |s: &Stone| ideal.binary_search(s).is_ok();
    let mut cands: Vec<Stone> = vec![Stone { layer: 1, a: 0, b: 0 }];
    for s in ideal {
        cands.extend(s.children());
    }
    cands.sort_unstable();
    cands.dedup();
    cands.retain(|c| !member(c) && c.parents().iter().all(|p| member(p)));
    cands
}

// ---------------------------------------------------------------------------
// Variable-map fit.

/// Affine dictionary `(w, b) -> (n, m)` together with a parity sign rule
/// `(-1)^(s0 n + s1 m + s2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableMap {
    pub n_row: [i64; 3],
    pub m_row: [i64; 3],
    pub sign_rule: [i64; 3],
}

impl VariableMap {
    pub fn apply(&self, w: i64, b: i64) -> (i64, i64) {
        (
            self.n_row[0] * w + self.n_row[1] * b + self.n_row[2],
            self.m_row[0] * w + self.m_row[1] * b + self.m_row[2],
        )
    }

    /// Sign carried by the coefficient at `(n, m)` relative to the count.
    pub fn sign(&self, n: i64, m: i64) -> i64 {
        let e = self.sign_rule[0] * n + self.sign_rule[1] * m + self.sign_rule[2];
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

fn linear_term(f: &mut fmt::Formatter<'_>, first: &mut bool, c: i64, var: &str) -> fmt::Result {
    if c == 0 {
        return Ok(());
    }
    if *first {
        *first = false;
        match c {
            1 => write!(f, "{var}")?,
            -1 => write!(f, "-{var}")?,
            _ => write!(f, "{c}*{var}")?,
        }
    } else if c > 0 {
        if c == 1 {
            write!(f, " + {var}")?;
        } else {
            write!(f, " + {c}*{var}")?;
        }
    } else if c == -1 {
        write!(f, " - {var}")?;
    } else {
        write!(f, " - {}*{var}", -c)?;
    }
    Ok(())
}

impl fmt::Display for VariableMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, row) in [("n", &self.n_row), ("m", &self.m_row)] {
            write!(f, "{label} = ")?;
            let mut first = true;
            linear_term(f, &mut first, row[0], "w")?;
            linear_term(f, &mut first, row[1], "b")?;
            if row[2] != 0 || first {
                if first {
                    write!(f, "{}", row[2])?;
                } else if row[2] > 0 {
                    write!(f, " + {}", row[2])?;
                } else {
                    write!(f, " - {}", -row[2])?;
                }
            }
            write!(f, "; ")?;
        }
        write!(f, "sign = (-1)^(")?;
        let mut first = true;
        linear_term(f, &mut first, self.sign_rule[0], "n")?;
        linear_term(f, &mut first, self.sign_rule[1], "m")?;
        if self.sign_rule[2] != 0 || first {
            if first {
                write!(f, "{}", self.sign_rule[2])?;
            } else if self.sign_rule[2] > 0 {
                write!(f, " + {}", self.sign_rule[2])?;
            } else {
                write!(f, " - {}", -self.sign_rule[2])?;
            }
        }
        write!(f, ")")
    }
}

/// Searches small integer-affine maps and parity sign rules matching pyramid
/// buckets against series coefficients.  Buckets whose image leaves the box
/// must be empty; the fit must be unique up to the `y -> 1/y` reflection.
pub fn fit_variable_map(
    counts: &Bucket,
    reference: &ConeSeries,
    fit_total: u32,
) -> Result<VariableMap> {
    let populated = counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|((w, b), _)| w + b)
        .max()
        .unwrap_or(0);
    if populated < 8 {
        return Err(Error::Config(format!(
            "variable-map fit needs buckets populated to total 8, got {populated}"
        )));
    }
    let model = reference.model().clone();
    let trunc = reference.truncation().clone();
    let mut table: BTreeMap<(i64, i64), Rat> = BTreeMap::new();
    for (n, beta, c) in reference.box_terms() {
        table.insert((n, model.h_degree(&beta)), c);
    }
    let mut buckets: Vec<(i64, i64, u64)> = Vec::new();
    for w in 0..=fit_total {
        for b in 0..=(fit_total - w) {
            let c = counts.get(&(w, b)).copied().unwrap_or(0);
            buckets.push((w as i64, b as i64, c));
        }
    }
    // Reject fast: check small totals first.
    buckets.sort_by_key(|&(w, b, _)| (w + b, w));

    let range = || -2i64..=2;
    let mut fits: Vec<VariableMap> = Vec::new();
    for a1 in range() {
        for a2 in range() {
            for a3 in range() {
                for a4 in range() {
                    for a5 in range() {
                        for a6 in range() {
                            for s in 0..8u8 {
                                let cand = VariableMap {
                                    n_row: [a1, a2, a3],
                                    m_row: [a4, a5, a6],
                                    sign_rule: [
                                        (s & 1) as i64,
                                        ((s >> 1) & 1) as i64,
                                        ((s >> 2) & 1) as i64,
                                    ],
                                };
                                if fit_holds(&cand, &buckets, &table, &trunc) {
                                    fits.push(cand);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // The reflection m -> -m pairs fits; keep the representative whose m-row
    // weights the black count positively.
    fits.retain(|f| {
        let key = [f.m_row[1], f.m_row[0], f.m_row[2]];
        let neg = [-key[0], -key[1], -key[2]];
        key >= neg
    });
    match fits.len() {
        1 => Ok(fits.pop().unwrap()),
        0 => Err(Error::Mismatch(
            "no affine variable map matches the pyramid counts".into(),
        )),
        _ => Err(Error::Mismatch(format!(
            "variable map is not unique: {}",
            fits.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" | ")
        ))),
    }
}

fn fit_holds(
    cand: &VariableMap,
    buckets: &[(i64, i64, u64)],
    table: &BTreeMap<(i64, i64), Rat>,
    trunc: &crate::series::Truncation,
) -> bool {
    for &(w, b, count) in buckets {
        let (n, m) = cand.apply(w, b);
        let in_box = (0..=trunc.n_max()).contains(&n) && m.abs() <= trunc.m_max();
        if !in_box {
            if count != 0 {
                return false;
            }
            continue;
        }
        let coeff = table.get(&(n, m)).cloned().unwrap_or_else(Rat::zero);
        let expected = rat_int(cand.sign(n, m) * count as i64);
        if coeff != expected {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Invariant values of the local product formulas.

/// Genus-zero invariant of the resolved conifold at curve degree `m` and
/// point degree `n`, extended over the lattice by the evenness symmetries.
/// Degree zero delegates to [`point_n`] with the conifold Euler
/// characteristic 2.
pub fn conifold_n(n: i64, m: i64) -> Rat {
    assert!(n != 0 || m != 0, "invariant undefined on the zero class");
    if m == 0 {
        return point_n(2, n.abs());
    }
    if n.abs() % m.abs() == 0 {
        rat(1, m * m)
    } else {
        Rat::zero()
    }
}

/// Degree-zero invariant `N_{n,0} = -chi * sigma2(n) / n^2`.
pub fn point_n(chi: i64, n: i64) -> Rat {
    assert!(n > 0, "degree-zero invariant needs n > 0, got {n}");
    if chi == 0 {
        return Rat::zero();
    }
    rat(-chi * sigma2(n), n * n)
}

/// Euler-characteristic weighted analogue of [`conifold_n`]: the curve
/// contribution carries `(-1)^(m-1)`.
pub fn conifold_n_hat(n: i64, m: i64) -> Rat {
    assert!(n != 0 || m != 0, "invariant undefined on the zero class");
    if m == 0 {
        return point_n_hat(2, n.abs());
    }
    if n.abs() % m.abs() == 0 {
        sign_pow(m.abs() + 1) * rat(1, m * m)
    } else {
        Rat::zero()
    }
}

/// Euler-characteristic weighted analogue of [`point_n`]: opposite sign.
pub fn point_n_hat(chi: i64, n: i64) -> Rat {
    -point_n(chi, n)
}
