//! Oracles and random generators shared by the integration suites.
//! Every generator takes an explicit ChaCha8 RNG so runs are reproducible,
//! and the norm oracles use algorithms independent of the library's
//! projected-ascent engine. Not every suite uses every item.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use grpdlab::algebra::AlgebraElement;
use grpdlab::groupoid::{FiniteGroupoid, FinitePartialBijectionSemigroup};
use grpdlab::pnorm::SpatialData;
use grpdlab::sft::{CylinderBisection, CylinderPair, Word, WordBox};
use grpdlab::thompson::{Table, TableColumn};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------
// independent p-norm oracles
// ---------------------------------------------------------------------

fn matvec(rows: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    rows.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn adjoint(rows: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = rows.len();
    (0..n)
        .map(|j| (0..n).map(|i| rows[i][j].conj()).collect())
        .collect()
}

pub fn vec_p_norm(x: &[Complex64], p: f64) -> f64 {
    x.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// The duality map ψ_p(y)_i = |y_i|^{p-1} · y_i/|y_i|, the gradient
/// direction of ‖·‖_p at y up to scale.
fn dual_map(y: &[Complex64], p: f64) -> Vec<Complex64> {
    y.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (z / r) * r.powf(p - 1.0)
            }
        })
        .collect()
}

fn ratio(rows: &[Vec<Complex64>], x: &[Complex64], p: f64) -> f64 {
    let d = vec_p_norm(x, p);
    if d == 0.0 {
        0.0
    } else {
        vec_p_norm(&matvec(rows, x), p) / d
    }
}

/// Fixed-point refinement x ← ψ_q(Aᴴ ψ_p(Ax)) with 1/p + 1/q = 1; the
/// gain ratio is nondecreasing along the iteration, so the final ratio is
/// a certified lower bound for ‖A‖_{p→p}.
fn boyd_refine(rows: &[Vec<Complex64>], at: &[Vec<Complex64>], x0: Vec<Complex64>, p: f64) -> f64 {
    let q = p / (p - 1.0);
    let mut x = x0;
    let mut best = ratio(rows, &x, p);
    for _ in 0..200 {
        let y = matvec(rows, &x);
        let z = matvec(at, &dual_map(&y, p));
        let next = dual_map(&z, q);
        let r = ratio(rows, &next, p);
        if !r.is_finite() || r <= best + 1e-13 {
            return best.max(if r.is_finite() { r } else { 0.0 });
        }
        best = r;
        x = next;
    }
    best
}

/// Magnitude profiles (m_1,…,m_n) with Σ m_i = resolution, m_i ≥ 0.
fn simplex_grid(n: usize, resolution: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![resolution]];
    }
    let mut out = Vec::new();
    for first in 0..=resolution {
        for mut tail in simplex_grid(n - 1, resolution - first) {
            let mut v = vec![first];
            v.append(&mut tail);
            out.push(v);
        }
    }
    out
}

/// Brute-force grid oracle for ‖A‖_{p→p} on square complex matrices,
/// 1 < p < ∞: seeds from a magnitude-simplex × phase-lattice grid, then
/// runs the monotone fixed-point refinement from every seed. Exact max
/// column sums handle p = 1.
pub fn oracle_p_norm(rows: &[Vec<Complex64>], p: f64) -> f64 {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n));
    if p == 1.0 {
        return (0..n)
            .map(|j| rows.iter().map(|r| r[j].norm()).sum::<f64>())
            .fold(0.0, f64::max);
    }
    let at = adjoint(rows);
    let phases = 8usize;
    let mut best: f64 = 0.0;
    for mags in simplex_grid(n, 4) {
        let support: Vec<usize> = (0..n).filter(|&i| mags[i] > 0).collect();
        // the leading nonzero coordinate can be taken real positive
        let free = support.len().saturating_sub(1);
        for code in 0..phases.pow(free as u32) {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            let mut c = code;
            for (slot, &i) in support.iter().enumerate() {
                let angle = if slot == 0 {
                    0.0
                } else {
                    let digit = c % phases;
                    c /= phases;
                    2.0 * std::f64::consts::PI * digit as f64 / phases as f64
                };
                x[i] = Complex64::from_polar(mags[i] as f64, angle);
            }
            best = best.max(boyd_refine(rows, &at, x, p));
        }
    }
    best
}

/// Largest singular value by power iteration on AᴴA, squeezed through
/// enough iterations that random inputs converge far below 1e-6.
pub fn spectral_norm(rows: &[Vec<Complex64>]) -> f64 {
    let n = rows.len();
    let at = adjoint(rows);
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * (i as f64 + 1.0)))
        .collect();
    let mut value = 0.0;
    for _ in 0..5000 {
        let y = matvec(&at, &matvec(rows, &x));
        let norm = vec_p_norm(&y, 2.0);
        if norm == 0.0 {
            return 0.0;
        }
        let next_value = norm.sqrt();
        let done = (next_value - value).abs() <= 1e-13 * next_value.max(1.0);
        value = next_value;
        x = y.iter().map(|z| z / norm).collect();
        if done {
            break;
        }
    }
    // Rayleigh quotient at the converged vector
    vec_p_norm(&matvec(rows, &x), 2.0) / vec_p_norm(&x, 2.0)
}

// ---------------------------------------------------------------------
// prefix partitions, tables, full-group bisections
// ---------------------------------------------------------------------

fn empty_box(alphabets: &[u32]) -> WordBox {
    alphabets
        .iter()
        .map(|&k| Word::empty(k).unwrap())
        .collect()
}

fn split_box(b: &WordBox, coordinate: usize) -> Vec<WordBox> {
    let k = b[coordinate].k();
    (0..k as u8)
        .map(|c| {
            let mut child = b.clone();
            child[coordinate] = b[coordinate].child(c);
            child
        })
        .collect()
}

/// A random complete prefix partition of the product Cantor space,
/// produced by repeatedly splitting a random box in a random coordinate.
/// Every coordinate word stays within max_depth.
pub fn random_partition(
    rng: &mut ChaCha8Rng,
    alphabets: &[u32],
    max_depth: usize,
) -> Vec<WordBox> {
    let mut boxes = vec![empty_box(alphabets)];
    let splits = rng.gen_range(0..=4);
    for _ in 0..splits {
        let candidates: Vec<(usize, usize)> = boxes
            .iter()
            .enumerate()
            .flat_map(|(i, b)| {
                (0..alphabets.len())
                    .filter(move |&c| b[c].len() < max_depth)
                    .map(move |c| (i, c))
            })
            .collect();
        let Some(&(i, c)) = candidates.choose(rng) else {
            break;
        };
        let children = split_box(&boxes[i], c);
        boxes.swap_remove(i);
        boxes.extend(children);
    }
    boxes
}

/// A random complete prefix partition with exactly `target` boxes, or
/// None when the greedy splitting strands itself (mixed alphabets can
/// make the last gap unreachable; callers retry).
fn partition_of_size(
    rng: &mut ChaCha8Rng,
    alphabets: &[u32],
    max_depth: usize,
    target: usize,
) -> Option<Vec<WordBox>> {
    let mut boxes = vec![empty_box(alphabets)];
    while boxes.len() < target {
        let gap = target - boxes.len();
        let candidates: Vec<(usize, usize)> = boxes
            .iter()
            .enumerate()
            .flat_map(|(i, b)| {
                (0..alphabets.len())
                    .filter(move |&c| {
                        b[c].len() < max_depth && (alphabets[c] as usize - 1) <= gap
                    })
                    .map(move |c| (i, c))
            })
            .collect();
        let &(i, c) = candidates.choose(rng)?;
        let children = split_box(&boxes[i], c);
        boxes.swap_remove(i);
        boxes.extend(children);
    }
    Some(boxes)
}

/// Two random equal-size partitions joined by a random matching: a valid
/// box table drawn uniformly enough for property testing.
pub fn random_table(rng: &mut ChaCha8Rng, alphabets: &[u32], max_depth: usize) -> Table {
    let (v, u) = random_partition_pair(rng, alphabets, max_depth);
    let columns = v
        .into_iter()
        .zip(u)
        .map(|(v, u)| TableColumn { v, u })
        .collect();
    Table::new(alphabets.to_vec(), columns).expect("matched partitions form a table")
}

/// Same construction packaged as a cylinder bisection Z(u_i; v_i).
pub fn random_full_bisection(
    rng: &mut ChaCha8Rng,
    alphabets: &[u32],
    max_depth: usize,
) -> CylinderBisection {
    let (v, u) = random_partition_pair(rng, alphabets, max_depth);
    let columns = v
        .into_iter()
        .zip(u)
        .map(|(domain, range)| CylinderPair::new(range, domain).expect("same alphabets"))
        .collect();
    CylinderBisection::new(alphabets.to_vec(), columns).expect("partition pair is full-group")
}

fn random_partition_pair(
    rng: &mut ChaCha8Rng,
    alphabets: &[u32],
    max_depth: usize,
) -> (Vec<WordBox>, Vec<WordBox>) {
    loop {
        let v = random_partition(rng, alphabets, max_depth);
        let Some(mut u) = partition_of_size(rng, alphabets, max_depth, v.len()) else {
            continue;
        };
        u.shuffle(rng);
        return (v, u);
    }
}

/// Evaluates a bisection on an explicit word tuple by locating the column
/// whose domain box is a coordinatewise prefix, then replacing prefixes.
/// Independent of the library's own application machinery.
pub fn eval_bisection(s: &CylinderBisection, w: &[Word]) -> Option<Vec<Word>> {
    'columns: for col in s.columns() {
        let domain = col.domain_box();
        let range = col.range_box();
        let mut image = Vec::with_capacity(w.len());
        for i in 0..w.len() {
            let Some(tail) = domain[i].extension_to(&w[i]) else {
                continue 'columns;
            };
            image.push(range[i].concat(tail));
        }
        return Some(image);
    }
    None
}

pub fn words_at_depth(k: u32, depth: usize) -> Vec<Word> {
    let mut out = vec![Word::empty(k).unwrap()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|w| (0..k as u8).map(move |c| w.child(c)))
            .collect();
    }
    out
}

/// All word tuples with the i-th coordinate at exactly depths[i].
pub fn tuples_at_depth(alphabets: &[u32], depths: &[usize]) -> Vec<Vec<Word>> {
    let mut out: Vec<Vec<Word>> = vec![Vec::new()];
    for (i, &k) in alphabets.iter().enumerate() {
        let layer = words_at_depth(k, depths[i]);
        out = out
            .into_iter()
            .flat_map(|t| {
                layer.iter().cloned().map(move |w| {
                    let mut t = t.clone();
                    t.push(w);
                    t
                })
            })
            .collect();
    }
    out
}

// ---------------------------------------------------------------------
// groupoid corpus
// ---------------------------------------------------------------------

/// A random principal groupoid: a disjoint union of 1 to 3 full
/// equivalence relations of size 1 to 4.
pub fn random_principal_groupoid(rng: &mut ChaCha8Rng) -> FiniteGroupoid {
    let blocks = rng.gen_range(1..=3);
    let mut g = FiniteGroupoid::full_equivalence(rng.gen_range(1..=4));
    for _ in 1..blocks {
        let h = FiniteGroupoid::full_equivalence(rng.gen_range(1..=4));
        g = FiniteGroupoid::disjoint_union(&g, &h);
    }
    g
}

/// A random finite groupoid together with its principality, decided at
/// construction time: non-principal members get a cyclic group block.
pub fn random_groupoid(rng: &mut ChaCha8Rng) -> (FiniteGroupoid, bool) {
    let g = random_principal_groupoid(rng);
    if rng.gen_bool(0.5) {
        (g, true)
    } else {
        let z = FiniteGroupoid::cyclic_group(rng.gen_range(2..=4));
        let g = if rng.gen_bool(0.5) {
            FiniteGroupoid::disjoint_union(&g, &z)
        } else {
            FiniteGroupoid::disjoint_union(&z, &g)
        };
        (g, false)
    }
}

/// A random nonempty bisection: arrows admitted in random order as long
/// as both endpoint maps stay injective.
pub fn random_bisection(rng: &mut ChaCha8Rng, g: &FiniteGroupoid) -> BTreeSet<usize> {
    let mut order: Vec<usize> = g.arrow_indices().collect();
    order.shuffle(rng);
    let mut used_src = BTreeSet::new();
    let mut used_tgt = BTreeSet::new();
    let mut s = BTreeSet::new();
    for a in order {
        if rng.gen_bool(0.5) && !used_src.contains(&g.src(a)) && !used_tgt.contains(&g.tgt(a)) {
            used_src.insert(g.src(a));
            used_tgt.insert(g.tgt(a));
            s.insert(a);
        }
    }
    if s.is_empty() {
        s.insert(rng.gen_range(0..g.n_arrows()));
    }
    s
}

pub fn random_element(rng: &mut ChaCha8Rng, g: &Arc<FiniteGroupoid>) -> AlgebraElement {
    let mut f = AlgebraElement::zero(g.clone());
    for a in g.arrow_indices() {
        f.set_coeff(
            a,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
    }
    f
}

// ---------------------------------------------------------------------
// group actions
// ---------------------------------------------------------------------

fn compose_perm(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&x| g[x]).collect()
}

fn random_perm(rng: &mut ChaCha8Rng, m: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(rng);
    p
}

/// The closure of random permutations of [m] under composition: a genuine
/// subgroup of S_m (identity and inverses come for free in a finite
/// semigroup of bijections).
fn random_permutation_group(rng: &mut ChaCha8Rng, m: usize, generators: usize) -> Vec<Vec<usize>> {
    let mut elements: Vec<Vec<usize>> = Vec::new();
    for _ in 0..generators {
        let p = random_perm(rng, m);
        if !elements.contains(&p) {
            elements.push(p);
        }
    }
    loop {
        let mut new = Vec::new();
        for g in &elements {
            for h in &elements {
                let gh = compose_perm(g, h);
                if !elements.contains(&gh) && !new.contains(&gh) {
                    new.push(gh);
                }
            }
        }
        if new.is_empty() {
            break;
        }
        elements.extend(new);
    }
    elements
}

/// A random group action by permutations, sometimes non-faithful: returns
/// the semigroup together with |G| and |X|.
pub fn random_group_action(
    rng: &mut ChaCha8Rng,
) -> (FinitePartialBijectionSemigroup, usize, usize) {
    let m = rng.gen_range(2..=4);
    if rng.gen_bool(0.25) {
        // abstract Z_k acting trivially: non-faithful but still a group
        let k = rng.gen_range(2..=3);
        let labels: Vec<String> = (0..k).map(|i| format!("g{i}")).collect();
        let table: Vec<Vec<usize>> = (0..k)
            .map(|i| (0..k).map(|j| (i + j) % k).collect())
            .collect();
        let perms = vec![(0..m).collect::<Vec<usize>>(); k];
        let x: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
        let s = FinitePartialBijectionSemigroup::group_action(x, labels, table, perms)
            .expect("trivial action tables are consistent");
        return (s, k, m);
    }
    let generators = rng.gen_range(1..=2);
    let perms = random_permutation_group(rng, m, generators);
    let n = perms.len();
    let table: Vec<Vec<usize>> = perms
        .iter()
        .map(|g| {
            perms
                .iter()
                .map(|h| {
                    let gh = compose_perm(g, h);
                    perms.iter().position(|e| *e == gh).expect("closed")
                })
                .collect()
        })
        .collect();
    let labels: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let x: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    let s = FinitePartialBijectionSemigroup::group_action(x, labels, table, perms)
        .expect("closure tables are consistent");
    (s, n, m)
}

// ---------------------------------------------------------------------
// spatial data and isomorphism search
// ---------------------------------------------------------------------

pub fn random_unit_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// A random weighted coordinate injection: each source keeps a 60% chance
/// of mapping somewhere, targets drawn without replacement.
pub fn random_spatial(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SpatialData {
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    let mut theta = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.gen_bool(0.6) {
            theta.push(targets.pop());
        } else {
            theta.push(None);
        }
    }
    let weights = (0..n).map(|_| random_unit_phase(rng)).collect();
    SpatialData::new(p, theta, weights).expect("constructed data is valid")
}

/// Brute-force isomorphism search over arrow bijections; only sensible
/// for single-digit arrow counts.
pub fn groupoids_isomorphic(a: &FiniteGroupoid, b: &FiniteGroupoid) -> bool {
    use itertools::Itertools;
    if a.n_arrows() != b.n_arrows() || a.n_units() != b.n_units() {
        return false;
    }
    let n = a.n_arrows();
    assert!(n <= 8, "exhaustive search is for small groupoids");
    'maps: for perm in (0..n).permutations(n) {
        for x in 0..n {
            if a.is_unit(x) != b.is_unit(perm[x])
                || perm[a.src(x)] != b.src(perm[x])
                || perm[a.tgt(x)] != b.tgt(perm[x])
            {
                continue 'maps;
            }
            for y in 0..n {
                if a.compose(x, y).map(|z| perm[z]) != b.compose(perm[x], perm[y]) {
                    continue 'maps;
                }
            }
        }
        return true;
    }
    false
}
