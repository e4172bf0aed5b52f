//! Finite fields, Steiner systems, finite planes, incidence matrices, and
//! strongly-regular-graph verification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Check, VerificationReport};

/// Largest field order accepted by `FiniteField::new`.
const MAX_FIELD_ORDER: u64 = 1 << 16;
/// Largest plane order; keeps incidence matrices at desk scale.
const MAX_PLANE_ORDER: u64 = 1 << 8;

/// The field GF(q) = GF(p^m). Elements are indices `0..q` encoding the
/// coefficients of a residue polynomial in base `p` (digit `i` is the
/// coefficient of `x^i`); index 0 is the zero element and index 1 the one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    pub q: u64,
    pub p: u64,
    pub m: u32,
    /// Coefficients of the monic irreducible modulus, low-to-high degree,
    /// length `m + 1`. Empty for prime fields.
    pub modulus: Vec<u64>,
}

fn factor_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 0;
    for cand in 2..=q {
        if q % cand == 0 {
            p = cand;
            break;
        }
    }
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p, m))
}

/// Polynomial remainder of `a` modulo monic `b`, coefficients mod `p`.
fn poly_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    while a.len() > db {
        let lead = *a.last().unwrap() % p;
        let shift = a.len() - 1 - db;
        if lead != 0 {
            for i in 0..=db {
                let t = (lead * b[i]) % p;
                a[shift + i] = (a[shift + i] + p - t % p) % p;
            }
        }
        a.pop();
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        if a.iter().all(|&c| c == 0) {
            return vec![0];
        }
    }
    a
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u32;
    if m == 1 {
        return true;
    }
    // constant term zero means x divides f
    if f[0] == 0 {
        return false;
    }
    // trial division against every monic polynomial of degree <= m/2
    for d in 1..=(m / 2) {
        let count = p.pow(d);
        for enc in 0..count {
            let mut g = Vec::with_capacity(d as usize + 1);
            let mut e = enc;
            for _ in 0..d {
                g.push(e % p);
                e /= p;
            }
            g.push(1); // monic
            let r = poly_rem(f.to_vec(), &g, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// Construct GF(q) for a prime power `2 <= q <= 2^16`. For extension
    /// fields the modulus is the lexicographically smallest monic irreducible
    /// polynomial of degree `m` over Z/p (coefficient lists compared
    /// low-to-high degree).
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 || q > MAX_FIELD_ORDER {
            return Err(Error::NotPrimePower(q));
        }
        let (p, m) = factor_prime_power(q)?;
        let modulus = if m == 1 {
            Vec::new()
        } else {
            let mut found = None;
            'outer: for enc in 0..q {
                // lexicographic order on (c_0, ..., c_{m-1}): c_0 varies slowest
                let mut coeffs = vec![0u64; m as usize];
                let mut e = enc;
                for i in (0..m as usize).rev() {
                    coeffs[i] = e % p;
                    e /= p;
                }
                let mut f = coeffs.clone();
                f.push(1);
                if is_irreducible(&f, p) {
                    found = Some(f);
                    break 'outer;
                }
            }
            found.expect("an irreducible polynomial of every degree exists")
        };
        Ok(FiniteField { q, p, m, modulus })
    }

    fn decode(&self, x: u64) -> Vec<u64> {
        let mut digits = vec![0u64; self.m as usize];
        let mut e = x;
        for d in digits.iter_mut() {
            *d = e % self.p;
            e /= self.p;
        }
        digits
    }

    fn encode(&self, coeffs: &[u64]) -> u64 {
        let mut x = 0;
        for &c in coeffs.iter().rev() {
            x = x * self.p + c % self.p;
        }
        x
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return (a + b) % self.p;
        }
        let (da, db) = (self.decode(a), self.decode(b));
        let sum: Vec<u64> = da.iter().zip(db.iter()).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.m == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let da = self.decode(a);
        let n: Vec<u64> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        self.encode(&n)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return (a * b) % self.p;
        }
        let (da, db) = (self.decode(a), self.decode(b));
        let mut prod = vec![0u64; 2 * self.m as usize - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let rem = poly_rem(prod, &self.modulus, self.p);
        self.encode(&rem)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "zero has no inverse");
        self.pow(a, self.q - 2)
    }

    /// Quadratic-residue character: 1 for nonzero squares, -1 for
    /// nonsquares, 0 at zero. Only meaningful for odd characteristic.
    pub fn chi(&self, a: u64) -> i64 {
        if a == 0 {
            return 0;
        }
        // a is a square iff a^((q-1)/2) = 1
        if self.pow(a, (self.q - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }
}

/// Construct GF(q); see [`FiniteField::new`].
pub fn field_create(q: u64) -> Result<FiniteField> {
    FiniteField::new(q)
}

/// A (2, k, v)-Steiner system with canonically ordered blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSteiner", into = "RawSteiner")]
pub struct SteinerSystem {
    v: usize,
    k: usize,
    /// Sorted k-subsets of `0..v`, listed in lexicographic order.
    blocks: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawSteiner {
    v: usize,
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<RawSteiner> for SteinerSystem {
    type Error = String;

    fn try_from(raw: RawSteiner) -> std::result::Result<Self, String> {
        let sys = SteinerSystem::from_blocks(raw.v, raw.k, raw.blocks);
        let report = verify_steiner(&sys);
        if !report.passed {
            let msg = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.detail.clone())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(format!("not a (2, {}, {})-Steiner system: {}", sys.k, sys.v, msg));
        }
        Ok(sys)
    }
}

impl From<SteinerSystem> for RawSteiner {
    fn from(s: SteinerSystem) -> Self {
        RawSteiner { v: s.v, k: s.k, blocks: s.blocks }
    }
}

impl SteinerSystem {
    /// Build from raw blocks without verification; points inside each block
    /// are sorted and the block list is put in canonical lexicographic order.
    pub fn from_blocks(v: usize, k: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        SteinerSystem { v, k, blocks }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block count b = v(v-1)/(k(k-1)).
    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    /// Replication number rho = (v-1)/(k-1): blocks through each point.
    pub fn rho(&self) -> usize {
        (self.v - 1) / (self.k - 1)
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let (v, b) = (self.v, self.b());
        let mut data = vec![0u8; v * b];
        for (bi, block) in self.blocks.iter().enumerate() {
            for &pt in block {
                data[pt * b + bi] = 1;
            }
        }
        IncidenceMatrix { v, b, data }
    }

    /// Blocks incident to a point, in block order.
    pub fn blocks_through(&self, point: usize) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.contains(&point))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Point-by-block 0/1 incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pub v: usize,
    pub b: usize,
    /// Row-major; row = point, column = block.
    pub data: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn entry(&self, point: usize, block: usize) -> u8 {
        self.data[point * self.b + block]
    }

    /// (N^T N)_{ij} over the integers.
    pub fn gram_entry(&self, i: usize, j: usize) -> i64 {
        (0..self.v)
            .map(|p| self.entry(p, i) as i64 * self.entry(p, j) as i64)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in 0..self.v {
            let row: Vec<String> = (0..self.b).map(|b| self.entry(p, b).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Simple undirected graph stored as a dense adjacency matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    adjacency: Vec<u8>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, adjacency: vec![0; n * n] }
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j, "no self loops");
        self.adjacency[i * self.n + j] = 1;
        self.adjacency[j * self.n + i] = 1;
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j] == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.adjacent(i, j)).count()
    }

    pub fn common_neighbors(&self, i: usize, j: usize) -> usize {
        (0..self.n).filter(|&k| self.adjacent(i, k) && self.adjacent(j, k)).count()
    }
}

/// The finite affine plane of prime-power order q as a (2, q, q^2)-Steiner
/// system. Points are GF(q)^2 indexed `x*q + y`; blocks are the affine lines.
pub fn affine_plane(q: u64) -> Result<SteinerSystem> {
    if q > MAX_PLANE_ORDER {
        return Err(Error::Domain(format!("plane order {} exceeds 2^8", q)));
    }
    let f = FiniteField::new(q)?;
    let qu = q as usize;
    let idx = |x: u64, y: u64| (x as usize) * qu + y as usize;
    let mut blocks = Vec::with_capacity(qu * qu + qu);
    // lines y = s*x + c
    for s in f.elements() {
        for c in f.elements() {
            let line: Vec<usize> = f.elements().map(|x| idx(x, f.add(f.mul(s, x), c))).collect();
            blocks.push(line);
        }
    }
    // vertical lines x = c
    for c in f.elements() {
        let line: Vec<usize> = f.elements().map(|y| idx(c, y)).collect();
        blocks.push(line);
    }
    Ok(SteinerSystem::from_blocks(qu * qu, qu, blocks))
}

/// Canonical representatives of the 1-dimensional subspaces of GF(q)^3:
/// first nonzero coordinate equal to 1, enumerated lexicographically.
fn projective_points(f: &FiniteField) -> Vec<[u64; 3]> {
    let mut pts = Vec::new();
    pts.push([0, 0, 1]);
    for c in f.elements() {
        pts.push([0, 1, c]);
    }
    for b in f.elements() {
        for c in f.elements() {
            pts.push([1, b, c]);
        }
    }
    pts.sort_unstable();
    pts
}

/// The finite projective plane of prime-power order q as a
/// (2, q+1, q^2+q+1)-Steiner system. Blocks are the 2-dimensional subspaces,
/// realized as kernels of the canonical nonzero functionals.
pub fn projective_plane(q: u64) -> Result<SteinerSystem> {
    if q > MAX_PLANE_ORDER {
        return Err(Error::Domain(format!("plane order {} exceeds 2^8", q)));
    }
    let f = FiniteField::new(q)?;
    let pts = projective_points(&f);
    let dot = |a: &[u64; 3], b: &[u64; 3]| {
        let t = f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1]));
        f.add(t, f.mul(a[2], b[2]))
    };
    let mut blocks = Vec::new();
    for functional in &pts {
        let block: Vec<usize> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| dot(functional, p) == 0)
            .map(|(i, _)| i)
            .collect();
        blocks.push(block);
    }
    let v = pts.len();
    Ok(SteinerSystem::from_blocks(v, q as usize + 1, blocks))
}

/// Check the defining t = 2 property: every pair of points lies in exactly
/// one block, and every block has size k.
pub fn verify_steiner(sys: &SteinerSystem) -> VerificationReport {
    let mut checks = Vec::new();

    let bad_sizes: Vec<usize> = sys
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.len() != sys.k)
        .map(|(i, _)| i)
        .collect();
    checks.push(Check::new(
        "block_sizes",
        bad_sizes.is_empty(),
        None,
        if bad_sizes.is_empty() {
            format!("all {} blocks have size {}", sys.b(), sys.k)
        } else {
            format!("blocks with wrong size: {:?}", bad_sizes)
        },
    ));

    let v = sys.v;
    let mut counts = vec![0u32; v * v];
    for block in &sys.blocks {
        for (ai, &a) in block.iter().enumerate() {
            for &b in &block[ai + 1..] {
                counts[a * v + b] += 1;
            }
        }
    }
    let mut violations = Vec::new();
    for a in 0..v {
        for b in (a + 1)..v {
            let c = counts[a * v + b];
            if c != 1 {
                violations.push(((a, b), c));
            }
        }
    }
    checks.push(Check::new(
        "pair_coverage",
        violations.is_empty(),
        None,
        if violations.is_empty() {
            format!("every pair of {} points covered exactly once", v)
        } else {
            format!("{} pairs with coverage != 1: {:?}", violations.len(), &violations[..violations.len().min(8)])
        },
    ));

    VerificationReport::from_checks(checks)
}

/// Graph on the blocks, adjacent when the blocks intersect.
pub fn block_intersection_graph(sys: &SteinerSystem) -> Graph {
    let b = sys.b();
    let mut g = Graph::new(b);
    for i in 0..b {
        for j in (i + 1)..b {
            if sys.blocks[i].iter().any(|p| sys.blocks[j].contains(p)) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Parameters of a strongly regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrgParams {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
    /// False when the graph has no non-adjacent pair (complete graph), in
    /// which case `mu` is reported as 0 by convention.
    pub mu_defined: bool,
}

/// Verify strong regularity and return the parameters, or name a violating
/// pair.
pub fn verify_srg(g: &Graph) -> Result<SrgParams> {
    assert!(g.n > 0, "graph must be nonempty");
    let k = g.degree(0);
    for i in 1..g.n {
        if g.degree(i) != k {
            return Err(Error::NotRegular(0, i));
        }
    }
    let mut lambda: Option<usize> = None;
    let mut mu: Option<usize> = None;
    for i in 0..g.n {
        for j in (i + 1)..g.n {
            let c = g.common_neighbors(i, j);
            let slot = if g.adjacent(i, j) { &mut lambda } else { &mut mu };
            match slot {
                Some(x) if *x != c => return Err(Error::NotStronglyRegular(i, j)),
                Some(_) => {}
                None => *slot = Some(c),
            }
        }
    }
    Ok(SrgParams {
        v: g.n,
        k,
        lambda: lambda.unwrap_or(0),
        mu: mu.unwrap_or(0),
        mu_defined: mu.is_some(),
    })
}
