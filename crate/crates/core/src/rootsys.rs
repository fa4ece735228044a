//! Type-A root data in gl_n coordinates: positive roots, weights,
//! multi-indices over root vectors, Weyl group words and normal orders.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q64 = Ratio<i64>;

/// Positive root `a_ij = e_i - e_j` with `1 <= i < j <= n`.
///
/// The derived order (lexicographic by `(i, j)`) is the reference PBW order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Root {
    pub i: u8,
    pub j: u8,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i < j && i >= 1, "root indices must satisfy 1 <= i < j");
        Root { i: i as u8, j: j as u8 }
    }

    pub fn height(self) -> i64 {
        (self.j - self.i) as i64
    }

    pub fn is_simple(self) -> bool {
        self.j == self.i + 1
    }

    pub fn weight(self, n: usize) -> Weight {
        let mut w = Weight::zero(n);
        w.coords[self.i as usize - 1] += 1;
        w.coords[self.j as usize - 1] -= 1;
        w
    }

    /// `a + b` when it is again a root.
    pub fn sum(self, other: Root) -> Option<Root> {
        if self.j == other.i {
            Some(Root { i: self.i, j: other.j })
        } else if other.j == self.i {
            Some(Root { i: other.i, j: self.j })
        } else {
            None
        }
    }

    pub fn parse(s: &str) -> Result<Root> {
        let t = s.trim();
        let digits = t
            .strip_prefix('a')
            .or_else(|| t.strip_prefix('E'))
            .or_else(|| t.strip_prefix('F'))
            .unwrap_or(t);
        let (i, j) = parse_index_pair(digits)?;
        if i >= j || i == 0 {
            return Err(Error::Parse(format!("not a positive root: {s}")));
        }
        Ok(Root::new(i, j))
    }
}

fn parse_index_pair(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("expected two indices, got {s:?}"));
    if let Some((a, b)) = s.split_once(',') {
        return Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?));
    }
    let ds: Vec<usize> = s
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
        .collect::<Result<_>>()?;
    if ds.len() != 2 {
        return Err(bad());
    }
    Ok((ds[0], ds[1]))
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}{}", self.i, self.j)
    }
}

/// A weight in e-coordinates. No quotient by the center is taken.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub coords: Vec<Q64>,
}

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight { coords: vec![Q64::zero(); n] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Weight { coords: v.iter().map(|&x| Q64::from_integer(x)).collect() }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Weight {
        Weight { coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: Q64) -> Weight {
        Weight { coords: self.coords.iter().map(|a| a * k).collect() }
    }

    /// `mu(H_a)` for `H_a = e_ii - e_jj`.
    pub fn pair(&self, root: Root) -> Q64 {
        self.coords[root.i as usize - 1] - self.coords[root.j as usize - 1]
    }

    /// Coefficients on the simple roots, valid for weights in the root lattice.
    pub fn simple_coefficients(&self) -> Vec<Q64> {
        let mut acc = Q64::zero();
        let mut out = Vec::with_capacity(self.n().saturating_sub(1));
        for c in &self.coords[..self.n().saturating_sub(1)] {
            acc += c;
            out.push(acc);
        }
        out
    }

    /// Sum of the simple-root coefficients.
    pub fn height(&self) -> Q64 {
        self.simple_coefficients().into_iter().fold(Q64::zero(), |a, b| a + b)
    }

    /// Whether all simple coefficients are non-negative integers and the
    /// coordinates sum to zero.
    pub fn is_in_positive_cone(&self) -> bool {
        let total: Q64 = self.coords.iter().fold(Q64::zero(), |a, b| a + b);
        total.is_zero()
            && self.simple_coefficients().iter().all(|c| c.is_integer() && !c.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Action of a permutation: `(w mu)_{w(i)} = mu_i`.
    pub fn permute(&self, w: &Permutation) -> Weight {
        let mut out = Weight::zero(self.n());
        for (i, c) in self.coords.iter().enumerate() {
            out.coords[w.0[i]] = *c;
        }
        out
    }

    pub fn parse(s: &str) -> Result<Weight> {
        let coords = s
            .split(',')
            .map(|t| parse_q64(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse("empty weight".into()));
        }
        Ok(Weight { coords })
    }
}

pub fn parse_q64(s: &str) -> Result<Q64> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let d: i64 = b.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q64::new(a.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(Q64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Exponents of a PBW monomial, keyed by positive root. Zero exponents are
/// never stored, so the derived equality is equality of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<(Root, u32)>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn single(r: Root) -> Self {
        MultiIndex(vec![(r, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Root, u32)>) -> Self {
        let mut m = MultiIndex::empty();
        for (r, e) in pairs {
            m.add_power(r, e);
        }
        m
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[(Root, u32)] {
        &self.0
    }

    pub fn exponent(&self, r: Root) -> u32 {
        self.0.iter().find(|(s, _)| *s == r).map_or(0, |(_, e)| *e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn add_power(&mut self, r: Root, e: u32) {
        if e == 0 {
            return;
        }
        match self.0.binary_search_by(|(s, _)| s.cmp(&r)) {
            Ok(pos) => self.0[pos].1 += e,
            Err(pos) => self.0.insert(pos, (r, e)),
        }
    }

    pub fn with_root(&self, r: Root) -> Self {
        let mut m = self.clone();
        m.add_power(r, 1);
        m
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        let mut m = self.clone();
        for &(r, e) in &other.0 {
            m.add_power(r, e);
        }
        m
    }

    /// First root factor in the reference order and the remaining index.
    pub fn split_first(&self) -> Option<(Root, MultiIndex)> {
        let (r, e) = *self.0.first()?;
        let mut rest = self.clone();
        if e == 1 {
            rest.0.remove(0);
        } else {
            rest.0[0].1 -= 1;
        }
        Some((r, rest))
    }

    /// The root factors in PBW order, with repetition.
    pub fn factors(&self) -> Vec<Root> {
        self.0.iter().flat_map(|&(r, e)| std::iter::repeat_n(r, e as usize)).collect()
    }

    /// `|I| = sum I_r a_r`.
    pub fn weight(&self, n: usize) -> Weight {
        let mut w = vec![0i64; n];
        for &(r, e) in &self.0 {
            w[r.i as usize - 1] += e as i64;
            w[r.j as usize - 1] -= e as i64;
        }
        Weight::from_ints(&w)
    }

    pub fn height(&self) -> i64 {
        self.0.iter().map(|&(r, e)| r.height() * e as i64).sum()
    }

    pub fn is_supported_on(&self, roots: &[Root]) -> bool {
        self.0.iter().all(|(r, _)| roots.contains(r))
    }

    /// Product notation, e.g. `F12^2*F23`; the empty index prints as `1`.
    pub fn monomial_string(&self, letter: char) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(r, e)| {
                if e == 1 {
                    format!("{letter}{}{}", r.i, r.j)
                } else {
                    format!("{letter}{}{}^{e}", r.i, r.j)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses `F12^2*F23`, `E13`, `1`.
    pub fn parse(s: &str) -> Result<MultiIndex> {
        let t = s.trim();
        if t == "1" || t.is_empty() {
            return Ok(MultiIndex::empty());
        }
        let mut m = MultiIndex::empty();
        for part in t.split('*') {
            let part = part.trim();
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b, e.trim().parse::<u32>().map_err(|_| Error::Parse(part.into()))?),
                None => (part, 1),
            };
            m.add_power(Root::parse(base)?, exp);
        }
        Ok(m)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.monomial_string('F'))
    }
}

/// Permutation of `{0..n-1}`: `self.0[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Transposition of the 1-based indices `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(a - 1, b - 1);
        p
    }

    /// Simple reflection `s_k` swapping `k` and `k + 1` (1-based).
    pub fn simple(n: usize, k: usize) -> Self {
        Self::transposition(n, k, k + 1)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn from_word(n: usize, word: &[usize]) -> Permutation {
        word.iter().fold(Self::identity(n), |acc, &k| acc.compose(&Self::simple(n, k)))
    }

    pub fn inversions(&self) -> usize {
        let n = self.n();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.0[i] > self.0[j]).count()
    }

    pub fn longest(n: usize) -> Permutation {
        Permutation((0..n).rev().collect())
    }

    /// All permutations of `n` letters in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if prefix.len() == used.len() {
                out.push(Permutation(prefix.clone()));
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    prefix.push(i);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }
}

/// Positive system of gl_n (acting through sl_n) in the reference order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    pub n: usize,
    pub positive_roots: Vec<Root>,
    pub simple_roots: Vec<Root>,
    /// `(n-1, n-2, ..., 0)`; differs from the half-sum by a central shift.
    pub rho: Weight,
}

impl RootDatum {
    pub fn new(n: usize) -> Result<Self> {
        Ok(RootDatum {
            n,
            positive_roots: positive_roots(n)?,
            simple_roots: (1..n).map(|i| Root::new(i, i + 1)).collect(),
            rho: Weight::from_ints(&(0..n).map(|i| (n - 1 - i) as i64).collect::<Vec<_>>()),
        })
    }

    pub fn num_positive(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn root_weight(&self, r: Root) -> Weight {
        r.weight(self.n)
    }
}

pub fn positive_roots(n: usize) -> Result<Vec<Root>> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    Ok((1..=n).flat_map(|i| (i + 1..=n).map(move |j| Root::new(i, j))).collect())
}

/// All reduced expressions of the longest element of `S_n`, as lists of
/// simple reflection indices (1-based).
pub fn reduced_words_of_w0(n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    let target_len = n * (n - 1) / 2;
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(target_len);
    fn dfs(w: &Permutation, word: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        let n = w.n();
        for k in 1..n {
            // right multiplication by s_k is length-increasing iff w(k) < w(k+1)
            if w.0[k - 1] < w.0[k] {
                word.push(k);
                dfs(&w.compose(&Permutation::simple(n, k)), word, len, out);
                word.pop();
            }
        }
    }
    dfs(&Permutation::identity(n), &mut word, target_len, &mut out);
    Ok(out)
}

/// `a_r = s_{a'_1} ... s_{a'_{r-1}} a'_r` for a reduced word `a'` of `w0`.
pub fn normal_order_from_word(n: usize, word: &[usize]) -> Result<Vec<Root>> {
    let m = n * (n - 1) / 2;
    let render = || word.iter().map(|k| format!("s{k}")).collect::<Vec<_>>().join(" ");
    if word.len() != m || word.iter().any(|&k| k == 0 || k >= n) {
        return Err(Error::NotReduced(render()));
    }
    let mut prefix = Permutation::identity(n);
    let mut order = Vec::with_capacity(m);
    for &k in word {
        let (a, b) = (prefix.0[k - 1], prefix.0[k]);
        if a > b {
            return Err(Error::NotReduced(render()));
        }
        order.push(Root::new(a + 1, b + 1));
        prefix = prefix.compose(&Permutation::simple(n, k));
    }
    Ok(order)
}

pub fn is_normal_order(n: usize, order: &[Root]) -> Result<bool> {
    let roots = positive_roots(n)?;
    let mut pos = BTreeMap::new();
    for (idx, r) in order.iter().enumerate() {
        if !roots.contains(r) || pos.insert(*r, idx).is_some() {
            return Err(Error::InvalidOrder(format!("{r} repeated or not a root of sl_{n}")));
        }
    }
    if pos.len() != roots.len() {
        return Err(Error::InvalidOrder("not a permutation of the positive roots".into()));
    }
    for (r_idx, r) in order.iter().enumerate() {
        for (s_idx, s) in order.iter().enumerate() {
            if let Some(t) = r.sum(*s) {
                let t_idx = pos[&t];
                let between = (r_idx < t_idx && t_idx < s_idx) || (s_idx < t_idx && t_idx < r_idx);
                if !between {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Inverse of [`normal_order_from_word`].
pub fn word_from_normal_order(n: usize, order: &[Root]) -> Result<Vec<usize>> {
    if !is_normal_order(n, order)? {
        return Err(Error::InvalidOrder(render_order(order)));
    }
    let mut prefix = Permutation::identity(n);
    let mut word = Vec::with_capacity(order.len());
    for r in order {
        let (a, b) = (prefix.0[r.i as usize - 1], prefix.0[r.j as usize - 1]);
        if b != a + 1 {
            return Err(Error::InvalidOrder(render_order(order)));
        }
        word.push(a + 1);
        prefix = prefix.compose(&Permutation::transposition(n, r.i as usize, r.j as usize));
    }
    Ok(word)
}

pub fn render_order(order: &[Root]) -> String {
    order.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn render_word(word: &[usize]) -> String {
    word.iter().map(|k| format!("s{k}")).collect::<Vec<_>>().join(" ")
}

pub fn parse_word(s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.strip_prefix('s')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad reflection {t:?}")))
        })
        .collect()
}

pub fn parse_order(s: &str) -> Result<Vec<Root>> {
    s.split(|c: char| c.is_whitespace() || c == ';').filter(|t| !t.is_empty()).map(Root::parse).collect()
}

/// `w . mu = w(mu + rho) - rho`.
pub fn dot_action(w: &Permutation, mu: &Weight, datum: &RootDatum) -> Weight {
    mu.add(&datum.rho).permute(w).sub(&datum.rho)
}

/// Number of ways of writing `nu` as an N-combination of positive roots.
pub fn kostant_partition_count(n: usize, nu: &Weight) -> Result<u64> {
    let roots = positive_roots(n)?;
    fn rec(roots: &[Root], rest: &Weight) -> u64 {
        if rest.is_zero() {
            return 1;
        }
        let Some((&r, tail)) = roots.split_first() else { return 0 };
        let rw = r.weight(rest.n());
        let mut total = 0;
        let mut cur = rest.clone();
        loop {
            if !cur.is_in_positive_cone() {
                break;
            }
            total += rec(tail, &cur);
            cur = cur.sub(&rw);
        }
        total
    }
    if !nu.is_in_positive_cone() {
        return Ok(0);
    }
    Ok(rec(&roots, nu))
}

/// A reductive subalgebra `h + a_{block_1} + a_{block_2} + ...` of gl_n, given
/// by pairwise disjoint index blocks. The empty spec is the Cartan subalgebra.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubalgebraSpec {
    pub blocks: Vec<Vec<u8>>,
}

impl SubalgebraSpec {
    pub fn new(mut blocks: Vec<Vec<u8>>) -> Result<Self> {
        for b in blocks.iter_mut() {
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) || b.contains(&0) {
                return Err(Error::Parse(format!("bad block {b:?}")));
            }
        }
        blocks.retain(|b| b.len() >= 2);
        blocks.sort();
        let mut seen = std::collections::BTreeSet::new();
        for &i in blocks.iter().flatten() {
            if !seen.insert(i) {
                return Err(Error::Parse("blocks of a subalgebra must be disjoint".into()));
            }
        }
        Ok(SubalgebraSpec { blocks })
    }

    pub fn cartan() -> Self {
        SubalgebraSpec { blocks: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        SubalgebraSpec { blocks: vec![(1..=n as u8).collect()] }
    }

    pub fn single(block: &[u8]) -> Result<Self> {
        Self::new(vec![block.to_vec()])
    }

    pub fn is_cartan(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.blocks.iter().flatten().copied().max().unwrap_or(0) as usize
    }

    /// Standard (a Levi of a standard parabolic) iff every block is consecutive.
    pub fn is_standard(&self) -> bool {
        self.blocks.iter().all(|b| b.windows(2).all(|w| w[1] == w[0] + 1))
    }

    pub fn is_full(&self, n: usize) -> bool {
        *self == Self::full(n)
    }

    /// Positive roots `(i_a, i_b)` within a block, in the reference order.
    pub fn roots(&self) -> Vec<Root> {
        let mut out: Vec<Root> = self
            .blocks
            .iter()
            .flat_map(|b| {
                b.iter().enumerate().flat_map(move |(x, &i)| b[x + 1..].iter().map(move |&j| Root::new(i as usize, j as usize)))
            })
            .collect();
        out.sort();
        out
    }

    pub fn contains_root(&self, r: Root) -> bool {
        self.blocks.iter().any(|b| b.contains(&r.i) && b.contains(&r.j))
    }

    /// Roots of the complement `u+` inside gl_n.
    pub fn complement_roots(&self, n: usize) -> Vec<Root> {
        positive_roots(n).unwrap_or_default().into_iter().filter(|r| !self.contains_root(*r)).collect()
    }

    pub fn is_subalgebra_of(&self, other: &SubalgebraSpec) -> bool {
        self.roots().iter().all(|r| other.contains_root(*r))
    }

    /// `rho_self(H_a)` for a root of this subalgebra: the distance of the
    /// indices inside their block.
    pub fn rho_pairing(&self, r: Root) -> Option<i64> {
        self.blocks.iter().find_map(|b| {
            let a = b.iter().position(|&i| i == r.i)?;
            let c = b.iter().position(|&i| i == r.j)?;
            Some(c as i64 - a as i64)
        })
    }

    /// Transpositions of adjacent block entries; they generate `W(self)`.
    pub fn weyl_generators(&self, n: usize) -> Vec<Permutation> {
        self.blocks
            .iter()
            .flat_map(|b| b.windows(2).map(|w| Permutation::transposition(n, w[0] as usize, w[1] as usize)).collect::<Vec<_>>())
            .collect()
    }

    /// All elements of `W(self)`.
    pub fn weyl_group(&self, n: usize) -> Vec<Permutation> {
        Permutation::all(n)
            .into_iter()
            .filter(|p| {
                (0..n).all(|i| {
                    let j = p.0[i];
                    i == j || self.blocks.iter().any(|b| b.contains(&((i + 1) as u8)) && b.contains(&((j + 1) as u8)))
                })
            })
            .collect()
    }

    /// Parses `h`, `12`, `124`, `12,45`, optionally prefixed by `l`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('l').unwrap_or(t);
        if t.is_empty() || t == "h" {
            return Ok(Self::cartan());
        }
        let blocks = t
            .split(',')
            .map(|b| {
                b.trim()
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse(format!("bad subalgebra {s:?}"))))
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        if self.max_index() > n {
            return Err(Error::Config(format!("subalgebra {self} does not fit in gl_{n}")));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        if self.blocks.is_empty() {
            return "h".into();
        }
        self.blocks
            .iter()
            .map(|b| b.iter().map(|i| i.to_string()).collect::<String>())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for SubalgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            write!(f, "h")
        } else {
            write!(f, "l{}", self.label())
        }
    }
}

/// Whether `t` lies in z+(l): central for `l` and positive on every root of `u+`.
pub fn in_z_plus(t: &Weight, l: &SubalgebraSpec) -> Result<bool> {
    let n = t.n();
    for r in l.roots() {
        if !t.pair(r).is_zero() {
            return Err(Error::NotCentral(format!("{r}(T) = {}", t.pair(r))));
        }
    }
    let u = l.complement_roots(n);
    Ok(!u.is_empty() && u.iter().all(|r| t.pair(*r) > Q64::zero()))
}

/// `sum_i c_i` helper for rationals.
pub fn q64_one() -> Q64 {
    Q64::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_words(n: usize) -> Vec<Vec<usize>> {
        let len = n * (n - 1) / 2;
        let w0 = Permutation::longest(n);
        let mut out = Vec::new();
        let total = (n - 1).pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let word: Vec<usize> = (0..len)
                .map(|_| {
                    let k = c % (n - 1) + 1;
                    c /= n - 1;
                    k
                })
                .collect();
            if Permutation::from_word(n, &word) == w0 {
                out.push(word);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn positive_root_lists() {
        assert_eq!(positive_roots(3).unwrap(), vec![Root::new(1, 2), Root::new(1, 3), Root::new(2, 3)]);
        assert_eq!(positive_roots(2).unwrap(), vec![Root::new(1, 2)]);
        assert_eq!(positive_roots(5).unwrap().len(), 10);
        assert_eq!(positive_roots(1), Err(Error::InvalidRank(1)));
    }

    #[test]
    fn reduced_word_counts_match_exhaustive_search() {
        assert_eq!(reduced_words_of_w0(2).unwrap(), vec![vec![1]]);
        for n in 3..=4 {
            let mut words = reduced_words_of_w0(n).unwrap();
            words.sort();
            assert_eq!(words, brute_force_words(n));
        }
        assert_eq!(reduced_words_of_w0(4).unwrap().len(), 16);
    }

    #[test]
    fn normal_orders_from_words() {
        let a = |i, j| Root::new(i, j);
        assert_eq!(normal_order_from_word(3, &[1, 2, 1]).unwrap(), vec![a(1, 2), a(1, 3), a(2, 3)]);
        assert_eq!(normal_order_from_word(3, &[2, 1, 2]).unwrap(), vec![a(2, 3), a(1, 3), a(1, 2)]);
        assert_eq!(normal_order_from_word(2, &[1]).unwrap(), vec![a(1, 2)]);
        assert!(matches!(normal_order_from_word(3, &[1, 1, 2]), Err(Error::NotReduced(_))));
    }

    #[test]
    fn normal_order_predicate() {
        let a = |i, j| Root::new(i, j);
        assert!(is_normal_order(3, &[a(1, 2), a(1, 3), a(2, 3)]).unwrap());
        assert!(!is_normal_order(3, &[a(1, 2), a(2, 3), a(1, 3)]).unwrap());
        assert!(is_normal_order(3, &[a(1, 2), a(1, 3)]).is_err());
    }

    #[test]
    fn words_and_orders_round_trip() {
        for n in 2..=4 {
            for w in reduced_words_of_w0(n).unwrap() {
                let order = normal_order_from_word(n, &w).unwrap();
                assert!(is_normal_order(n, &order).unwrap());
                assert_eq!(word_from_normal_order(n, &order).unwrap(), w);
            }
        }
        let a = |i, j| Root::new(i, j);
        assert_eq!(word_from_normal_order(3, &[a(2, 3), a(1, 3), a(1, 2)]).unwrap(), vec![2, 1, 2]);
    }

    #[test]
    fn rho_pairs_positively() {
        let d = RootDatum::new(4).unwrap();
        for r in &d.positive_roots {
            assert_eq!(d.rho.pair(*r), Q64::from_integer(r.height()));
        }
    }

    #[test]
    fn dot_action_examples() {
        let d = RootDatum::new(2).unwrap();
        let s1 = Permutation::simple(2, 1);
        let mu = Weight::zero(2);
        assert_eq!(dot_action(&Permutation::identity(2), &mu, &d), mu);
        let img = dot_action(&s1, &mu, &d);
        assert_eq!(img.pair(Root::new(1, 2)), Q64::from_integer(-2));
        // s_a . mu - mu = i a when (mu + rho)(H_a) = -i
        let d3 = RootDatum::new(3).unwrap();
        let a13 = Root::new(1, 3);
        let mu = Weight::from_ints(&[-5, 0, 0]);
        let i = -(mu.add(&d3.rho).pair(a13));
        let s = Permutation::transposition(3, 1, 3);
        assert_eq!(dot_action(&s, &mu, &d3).sub(&mu), a13.weight(3).scale(i));
    }

    #[test]
    fn dot_action_is_a_group_action() {
        let d = RootDatum::new(3).unwrap();
        let mu = Weight::parse("1/2,-3,7").unwrap();
        for v in Permutation::all(3) {
            for w in Permutation::all(3) {
                let lhs = dot_action(&v.compose(&w), &mu, &d);
                let rhs = dot_action(&v, &dot_action(&w, &mu, &d), &d);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn levi_and_global_dot_actions_agree() {
        // rho_g - rho_l is fixed by W(l)
        let d = RootDatum::new(4).unwrap();
        let l = SubalgebraSpec::parse("23").unwrap();
        let rho_l = Weight::from_ints(&[0, 1, 0, 0]);
        let mu = Weight::parse("3,1/3,-2,5").unwrap();
        for w in l.weyl_group(4) {
            let local = mu.add(&rho_l).permute(&w).sub(&rho_l);
            assert_eq!(local, dot_action(&w, &mu, &d));
        }
    }

    #[test]
    fn z_plus_membership() {
        let l23 = SubalgebraSpec::parse("23").unwrap();
        assert!(in_z_plus(&Weight::from_ints(&[2, -1, -1]), &l23).unwrap());
        assert!(!in_z_plus(&Weight::zero(3), &l23).unwrap());
        let l12 = SubalgebraSpec::parse("12").unwrap();
        assert!(in_z_plus(&Weight::from_ints(&[1, 1, -2]), &l12).unwrap());
        assert!(matches!(in_z_plus(&Weight::from_ints(&[-1, 0, 0]), &l23), Ok(false)));
        assert!(matches!(in_z_plus(&Weight::from_ints(&[0, 1, 0]), &l23), Err(Error::NotCentral(_))));
    }

    #[test]
    fn kostant_counts() {
        let nu = Root::new(1, 3).weight(3);
        assert_eq!(kostant_partition_count(3, &nu).unwrap(), 2);
        let nu = Root::new(1, 4).weight(4);
        assert_eq!(kostant_partition_count(4, &nu).unwrap(), 4);
        assert_eq!(kostant_partition_count(3, &Root::new(1, 2).weight(3).neg()).unwrap(), 0);
    }

    #[test]
    fn subalgebra_specs() {
        let l = SubalgebraSpec::parse("12,45").unwrap();
        assert!(l.is_standard());
        assert_eq!(l.roots(), vec![Root::new(1, 2), Root::new(4, 5)]);
        let m = SubalgebraSpec::parse("124").unwrap();
        assert!(!m.is_standard());
        assert_eq!(m.rho_pairing(Root::new(1, 4)), Some(2));
        assert_eq!(m.rho_pairing(Root::new(2, 4)), Some(1));
        assert!(SubalgebraSpec::parse("12,23").is_err());
        assert_eq!(SubalgebraSpec::parse("h").unwrap().to_string(), "h");
        assert_eq!(l.to_string(), "l12,45");
        assert_eq!(SubalgebraSpec::parse("123").unwrap().weyl_group(3).len(), 6);
    }

    #[test]
    fn multi_index_basics() {
        let i = MultiIndex::parse("F12^2*F23").unwrap();
        assert_eq!(i.to_string(), "F12^2*F23");
        assert_eq!(i.weight(3), Weight::from_ints(&[2, -1, -1]));
        assert_eq!(i.height(), 3);
        let (first, rest) = i.split_first().unwrap();
        assert_eq!(first, Root::new(1, 2));
        assert_eq!(rest.to_string(), "F12*F23");
    }
}
