use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::algebra::AlgebraElement;
use super::group::{Code, ElementaryAbelian, FiniteGroup, GroupLaw, HeisenbergGroup};
use crate::error::{Error, Result};

/// Largest group for which a dense transform or Mackey table is held in memory.
pub const DENSE_TRANSFORM_LIMIT: u64 = 1 << 22;
/// Largest group for which the full convolution matrix is decomposed.
pub const DENSE_MATRIX_LIMIT: u64 = 729;
/// Upper bound on |supp f| * |H| for the translation table used by power iteration.
pub const POWER_TABLE_LIMIT: u64 = 40_000_000;
/// Inner block size used by streaming character sweeps.
const INNER_BLOCK: u64 = 1 << 18;

/// Singular values of a convolution operator, each with its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<(f64, f64)>,
    pub order: u64,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.values.iter().map(|v| v.0).fold(0.0, f64::max)
    }

    /// (tau |x|^p)^(1/p) with the normalised trace; `p = inf` gives the operator norm.
    pub fn lp(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("L^p exponent must be >= 1, got {p}")));
        }
        let top = self.max();
        if p.is_infinite() || top == 0.0 {
            return Ok(top);
        }
        let sum: f64 = self.values.iter().map(|&(s, w)| w * (s / top).powf(p)).sum();
        Ok(top * (sum / self.order as f64).powf(1.0 / p))
    }

    /// Total multiplicity of singular values above `tol`.
    pub fn support_measure(&self, tol: f64) -> f64 {
        self.values.iter().filter(|v| v.0 > tol).map(|v| v.1).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.values.iter().map(|v| v.1).sum()
    }
}

fn roots_of_unity(p: u32) -> Vec<Complex64> {
    (0..p)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / p as f64))
        .collect()
}

/// In-place transform x(v) -> sum_u x(u) w^<u,v> along the first `axes`
/// base-p digits of the index. `data.len()` must equal p^axes.
fn dft_axes(data: &mut [Complex64], p: usize, axes: u32, omega: &[Complex64]) {
    let mut buf = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1usize;
    for _ in 0..axes {
        let block = stride * p;
        for start in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (u, b) in buf.iter_mut().enumerate() {
                    *b = data[base + u * stride];
                }
                for v in 0..p {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (u, b) in buf.iter().enumerate() {
                        acc += b * omega[(u * v) % p];
                    }
                    data[base + v * stride] = acc;
                }
            }
        }
        stride = block;
    }
}

/// Summary of |f^(chi)| over all characters of an elementary abelian group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterStats {
    pub max_abs: f64,
    /// Number of characters with |f^(chi)| > tol.
    pub support: u64,
    /// sum_chi |f^(chi)|^2.
    pub sum_sq: f64,
    /// Code of a character attaining the maximum.
    pub argmax: u64,
}

/// Visits f^(chi) for every character, in blocks, without materialising the
/// whole transform. The callback receives the codes of the first character
/// of each block together with its values.
pub fn sweep_characters<F: FnMut(u64, &[Complex64])>(f: &AlgebraElement, g: &ElementaryAbelian, mut visit: F) {
    let p = g.p as u64;
    let mut inner_dim = 0u32;
    while inner_dim < g.dim && p.pow(inner_dim + 1) <= INNER_BLOCK {
        inner_dim += 1;
    }
    let outer_dim = g.dim - inner_dim;
    let inner_size = p.pow(inner_dim);
    let outer_size = p.pow(outer_dim);
    let omega = roots_of_unity(g.p);
    let outer_group = ElementaryAbelian::new(g.p, outer_dim);
    let points: Vec<(usize, Vec<u32>, Complex64)> = f
        .iter()
        .map(|(code, c)| ((code % inner_size) as usize, outer_group.coords(code / inner_size), c))
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); inner_size as usize];
    for outer in 0..outer_size {
        let u = outer_group.coords(outer);
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (inner, coords, c) in &points {
            let phase = u.iter().zip(coords).map(|(a, b)| (a * b) as u64).sum::<u64>() % p;
            buf[*inner] += c * omega[phase as usize];
        }
        dft_axes(&mut buf, g.p as usize, inner_dim, &omega);
        visit(outer * inner_size, &buf);
    }
}

pub fn character_stats(f: &AlgebraElement, g: &ElementaryAbelian, tol: f64) -> CharacterStats {
    character_stats_sampled(f, g, tol, &[]).0
}

/// Character statistics together with |f^(chi)| at the requested codes, in one sweep.
pub fn character_stats_sampled(
    f: &AlgebraElement,
    g: &ElementaryAbelian,
    tol: f64,
    samples: &[u64],
) -> (CharacterStats, Vec<f64>) {
    let mut stats = CharacterStats { max_abs: 0.0, support: 0, sum_sq: 0.0, argmax: 0 };
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by_key(|&k| samples[k]);
    let mut values = vec![f64::NAN; samples.len()];
    let mut next = 0;
    sweep_characters(f, g, |start, block| {
        let end = start + block.len() as u64;
        while next < order.len() && samples[order[next]] < end {
            let code = samples[order[next]];
            if code >= start {
                values[order[next]] = block[(code - start) as usize].norm();
            }
            next += 1;
        }
        for (k, z) in block.iter().enumerate() {
            let a = z.norm();
            if a > stats.max_abs {
                stats.max_abs = a;
                stats.argmax = start + k as u64;
            }
            stats.sum_sq += a * a;
            if a > tol {
                stats.support += 1;
            }
        }
    });
    (stats, values)
}

/// Direct evaluation of f^(chi_u) = sum_g f(g) w^<u, g>; a slow oracle for the sweep.
pub fn character_value(f: &AlgebraElement, g: &ElementaryAbelian, u: &[u32]) -> Complex64 {
    let omega = roots_of_unity(g.p);
    f.iter()
        .map(|(code, c)| {
            let x = g.coords(code);
            let phase = u.iter().zip(&x).map(|(a, b)| (a * b) as u64).sum::<u64>() % g.p as u64;
            c * omega[phase as usize]
        })
        .sum()
}

pub fn abelian_spectrum(f: &AlgebraElement, g: &ElementaryAbelian) -> Result<Spectrum> {
    let order = g.order();
    if order > DENSE_TRANSFORM_LIMIT {
        return Err(Error::Budget {
            needed: order as u128,
            budget: DENSE_TRANSFORM_LIMIT as u128,
            hint: "use character_stats for large abelian groups".into(),
        });
    }
    let mut values = Vec::with_capacity(order as usize);
    sweep_characters(f, g, |_, block| values.extend(block.iter().map(|z| (z.norm(), 1.0))));
    Ok(Spectrum { values, order })
}

/// Row-reduces a square matrix over F_p and returns (rank, pivot columns).
fn rank_mod_p(mut rows: Vec<Vec<u32>>, p: u32) -> (usize, Vec<usize>) {
    let n_cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        let Some(piv) = (r..rows.len()).find(|&k| rows[k][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = mod_inverse(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = (*x as u64 * inv as u64 % p as u64) as u32;
        }
        for k in 0..rows.len() {
            if k != r && rows[k][c] != 0 {
                let factor = rows[k][c];
                for col in 0..n_cols {
                    let sub = (factor as u64 * rows[r][col] as u64 % p as u64) as u32;
                    rows[k][col] = (rows[k][col] + p - sub) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (r, pivots)
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn singular_values(m: DMatrix<Complex64>) -> Vec<f64> {
    m.singular_values().iter().copied().collect()
}

/// Spectrum of left convolution on a Heisenberg group through its
/// decomposition into representations induced from the normal subgroup
/// N = {(0, B, C)}.
///
/// For a character chi(0,B,C) = w^(<mu,B> + <l,C>) the induced block is
/// M[Y][Y+A] = sum_B G_l[A][B] w^<mu + 2 H_l Y, B>, where H_l is the Hankel
/// matrix (l_{r+s}) and G_l[A][B] = sum_C f(A,B,C) w^<l, C + AB>. Characters
/// differing by the column space of H_l give equivalent blocks.
pub fn heisenberg_spectrum(f: &AlgebraElement, h: &HeisenbergGroup) -> Result<Spectrum> {
    let p = h.p();
    let pu = p as usize;
    let ab = h.ab_len();
    let cl = h.c_len();
    let v_size = pu.pow(ab as u32);
    let c_size = pu.pow(cl as u32);
    let omega = roots_of_unity(p);
    let va = ElementaryAbelian::new(p, ab as u32);
    let vc = ElementaryAbelian::new(p, cl as u32);

    let mut pair_index: BTreeMap<(Code, Code), usize> = BTreeMap::new();
    let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
    for (code, coeff) in f.iter() {
        let x = h.decode(code);
        let mut ct = x.c.clone();
        h.add_product(&mut ct, &x.a, &x.b, false);
        let key = (va.encode(&x.a), va.encode(&x.b));
        let next = pair_index.len();
        let k = *pair_index.entry(key).or_insert(next);
        entries.push((k, vc.encode(&ct) as usize, coeff));
    }
    let n_pairs = pair_index.len();
    if (n_pairs as u64) * (c_size as u64) > DENSE_TRANSFORM_LIMIT * 4 {
        return Err(Error::Budget {
            needed: (n_pairs * c_size) as u128,
            budget: (DENSE_TRANSFORM_LIMIT * 4) as u128,
            hint: "Heisenberg transform table too large".into(),
        });
    }
    let mut table = vec![Complex64::new(0.0, 0.0); n_pairs * c_size];
    for (k, c, coeff) in entries {
        table[k * c_size + c] += coeff;
    }
    for row in table.chunks_mut(c_size) {
        dft_axes(row, pu, cl as u32, &omega);
    }

    let mut a_codes: Vec<Code> = pair_index.keys().map(|k| k.0).collect();
    a_codes.dedup();
    let a_pos: BTreeMap<Code, usize> = a_codes.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let a_coords: Vec<Vec<u32>> = a_codes.iter().map(|&a| va.coords(a)).collect();
    let y_coords: Vec<Vec<u32>> = (0..v_size as u64).map(|y| va.coords(y)).collect();
    // (Y + A) for each Y and each A in the support.
    let shifted: Vec<Vec<usize>> = y_coords
        .iter()
        .map(|y| {
            a_coords
                .iter()
                .map(|a| va.encode(&y.iter().zip(a).map(|(s, t)| (s + t) % p).collect::<Vec<_>>()) as usize)
                .collect()
        })
        .collect();

    let mut values = Vec::new();
    let mut t = vec![Complex64::new(0.0, 0.0); a_codes.len() * v_size];
    for l in 0..c_size {
        let mut any = false;
        t.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (&(a, b), &k) in &pair_index {
            let z = table[k * c_size + l];
            if z.norm_sqr() > 0.0 {
                any = true;
                t[a_pos[&a] * v_size + b as usize] = z;
            }
        }
        if !any {
            continue;
        }
        for row in t.chunks_mut(v_size) {
            dft_axes(row, pu, ab as u32, &omega);
        }
        let lc = vc.coords(l as u64);
        let hankel: Vec<Vec<u32>> = (0..ab).map(|r| (0..ab).map(|s| lc[r + s]).collect()).collect();
        let (rank, pivots) = rank_mod_p(hankel.clone(), p);
        let free: Vec<usize> = (0..ab).filter(|c| !pivots.contains(c)).collect();
        let weight = (p as f64).powi(rank as i32);
        // 2 H Y for every Y.
        let two_hy: Vec<Vec<u32>> = y_coords
            .iter()
            .map(|y| {
                (0..ab)
                    .map(|s| {
                        let v: u64 = (0..ab).map(|r| hankel[r][s] as u64 * y[r] as u64).sum();
                        (2 * v % p as u64) as u32
                    })
                    .collect()
            })
            .collect();
        let free_group = ElementaryAbelian::new(p, free.len() as u32);
        for rep in 0..free_group.order() {
            let fc = free_group.coords(rep);
            let mut mu = vec![0u32; ab];
            for (k, &c) in free.iter().enumerate() {
                mu[c] = fc[k];
            }
            let mut m = DMatrix::<Complex64>::zeros(v_size, v_size);
            for y in 0..v_size {
                let nu: Vec<u32> = mu.iter().zip(&two_hy[y]).map(|(a, b)| (a + b) % p).collect();
                let nu_code = va.encode(&nu) as usize;
                for (ai, &x) in shifted[y].iter().enumerate() {
                    m[(y, x)] += t[ai * v_size + nu_code];
                }
            }
            for s in singular_values(m) {
                if s > 0.0 {
                    values.push((s, weight));
                }
            }
        }
    }
    Ok(Spectrum { values, order: h.order() })
}

/// Singular values of the full |H| x |H| matrix of left convolution by f.
pub fn dense_spectrum<G: GroupLaw + ?Sized>(f: &AlgebraElement, g: &G) -> Result<Spectrum> {
    let n = g.order();
    if n > DENSE_MATRIX_LIMIT {
        return Err(Error::Budget {
            needed: n as u128,
            budget: DENSE_MATRIX_LIMIT as u128,
            hint: "dense convolution matrix too large".into(),
        });
    }
    let mut m = DMatrix::<Complex64>::zeros(n as usize, n as usize);
    for (h, c) in f.iter() {
        for y in 0..n {
            m[(g.mul(h, y) as usize, y as usize)] += c;
        }
    }
    let values = singular_values(m).into_iter().map(|s| (s, 1.0)).collect();
    Ok(Spectrum { values, order: n })
}

/// Settings for matrix-free power iteration on f* f.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    pub seed: u64,
    pub restarts: usize,
    /// Bound on |f*f v - rho v| / rho for acceptance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration { seed: 0x5eed, restarts: 10, tol: 1e-9, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationResult {
    pub norm: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Largest singular value of left convolution by f, by power iteration on f* f.
pub fn power_iteration_norm<G: GroupLaw + ?Sized>(
    f: &AlgebraElement,
    g: &G,
    cfg: &PowerIteration,
) -> Result<PowerIterationResult> {
    let n = g.order();
    let supp: Vec<(Code, Complex64)> = f.iter().collect();
    if supp.is_empty() {
        return Ok(PowerIterationResult { norm: 0.0, residual: 0.0, iterations: 0 });
    }
    let cells = supp.len() as u64 * n;
    if cells > POWER_TABLE_LIMIT {
        return Err(Error::Budget {
            needed: cells as u128,
            budget: POWER_TABLE_LIMIT as u128,
            hint: "translation table for power iteration too large".into(),
        });
    }
    let n = n as usize;
    // table[k * n + y] = g_k * y
    let mut table = vec![0u32; supp.len() * n];
    for (k, &(h, _)) in supp.iter().enumerate() {
        for y in 0..n {
            table[k * n + y] = g.mul(h, y as Code) as u32;
        }
    }
    let apply = |v: &[Complex64], tmp: &mut [Complex64], out: &mut [Complex64]| {
        tmp.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (k, &(_, c)) in supp.iter().enumerate() {
            let row = &table[k * n..(k + 1) * n];
            for (y, &gy) in row.iter().enumerate() {
                tmp[gy as usize] += c * v[y];
            }
        }
        for (y, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &(_, c)) in supp.iter().enumerate() {
                acc += c.conj() * tmp[table[k * n + y] as usize];
            }
            *o = acc;
        }
    };
    let norm2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<PowerIterationResult> = None;
    let mut worst_residual = 0.0f64;
    let mut total_iters = 0usize;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..cfg.restarts.max(1) {
        for z in v.iter_mut() {
            *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let s = norm2(&v);
        v.iter_mut().for_each(|z| *z /= s);
        let mut converged = None;
        let mut residual = f64::INFINITY;
        for it in 0..cfg.max_iter {
            apply(&v, &mut tmp, &mut w);
            let rho: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            total_iters += 1;
            if rho <= 0.0 {
                converged = Some((0.0, 0.0, it + 1));
                break;
            }
            residual = v.iter().zip(&w).map(|(a, b)| (b - a * rho).norm_sqr()).sum::<f64>().sqrt() / rho;
            if residual < cfg.tol {
                converged = Some((rho, residual, it + 1));
                break;
            }
            let s = norm2(&w);
            for (a, b) in v.iter_mut().zip(&w) {
                *a = b / s;
            }
        }
        match converged {
            Some((rho, res, iters)) => {
                let cand = PowerIterationResult { norm: rho.sqrt(), residual: res, iterations: iters };
                if best.is_none_or(|b| cand.norm > b.norm) {
                    best = Some(cand);
                }
            }
            None => worst_residual = worst_residual.max(residual),
        }
    }
    match best {
        Some(mut b) => {
            b.iterations = total_iters;
            Ok(b)
        }
        None => Err(Error::Convergence { residual: worst_residual, iterations: total_iters }),
    }
}

/// Full spectrum of left convolution by f, using the fastest exact path.
pub fn spectrum(f: &AlgebraElement, g: &FiniteGroup) -> Result<Spectrum> {
    match g {
        FiniteGroup::Abelian(a) => abelian_spectrum(f, a),
        FiniteGroup::Heisenberg(h) => heisenberg_spectrum(f, h),
        FiniteGroup::Enumerated(e) => dense_spectrum(f, e),
    }
}

/// Operator norm of left convolution by f on l^2(H).
pub fn cstar_norm(f: &AlgebraElement, g: &FiniteGroup) -> Result<f64> {
    match g {
        FiniteGroup::Abelian(a) => Ok(character_stats(f, a, 0.0).max_abs),
        FiniteGroup::Heisenberg(h) => Ok(heisenberg_spectrum(f, h)?.max()),
        FiniteGroup::Enumerated(e) => Ok(power_iteration_norm(f, e, &PowerIteration::default())?.norm),
    }
}

/// Non-commutative L^p norm (tau |f|^p)^(1/p) for p >= 1; p = inf is the C*-norm.
pub fn nc_lp_norm(f: &AlgebraElement, g: &FiniteGroup, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("L^p exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return cstar_norm(f, g);
    }
    spectrum(f, g)?.lp(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::FieldConfig;

    fn sorted_values(s: &Spectrum) -> Vec<f64> {
        let mut out = Vec::new();
        for &(v, w) in &s.values {
            for _ in 0..(w.round() as usize) {
                out.push(v);
            }
        }
        out.retain(|&v| v > 1e-12);
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out
    }

    #[test]
    fn sweep_matches_direct_characters() {
        let g = ElementaryAbelian::new(3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = AlgebraElement::random(&g, 20, &mut rng);
        let mut seen = 0;
        sweep_characters(&f, &g, |start, block| {
            for (k, z) in block.iter().enumerate() {
                let u = g.coords(start + k as u64);
                assert!((z - character_value(&f, &g, &u)).norm() < 1e-10);
                seen += 1;
            }
        });
        assert_eq!(seen, 81);
    }

    #[test]
    fn abelian_dense_and_power_paths_agree() {
        let g = ElementaryAbelian::new(5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = AlgebraElement::random(&g, 30, &mut rng);
        let dense = dense_spectrum(&f, &g).unwrap();
        let fast = abelian_spectrum(&f, &g).unwrap();
        let a = sorted_values(&dense);
        let b = sorted_values(&fast);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
        let pw = power_iteration_norm(&f, &g, &PowerIteration::default()).unwrap();
        assert!((pw.norm - fast.max()).abs() < 1e-8, "{} vs {}", pw.norm, fast.max());
    }

    #[test]
    fn mackey_blocks_match_dense_matrix() {
        let field = FieldConfig::equal_char(3).unwrap();
        for (m, cd) in [(0, 0), (0, 2), (1, 2)] {
            let h = HeisenbergGroup::new(field, m, cd).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5 + cd as u64);
            let f = AlgebraElement::random(&h, 25, &mut rng);
            let mackey = heisenberg_spectrum(&f, &h).unwrap();
            assert!(mackey.total_weight() <= h.order() as f64 + 1e-9);
            let pw = power_iteration_norm(&f, &h, &PowerIteration::default()).unwrap();
            assert!((pw.norm - mackey.max()).abs() < 1e-8);
            if h.order() <= DENSE_MATRIX_LIMIT {
                let dense = dense_spectrum(&f, &h).unwrap();
                let a = sorted_values(&dense);
                let b = sorted_values(&mackey);
                assert_eq!(a.len(), b.len(), "m={m}");
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-8);
                }
                for pe in [1.0, 3.5] {
                    assert!((mackey.lp(pe).unwrap() - dense.lp(pe).unwrap()).abs() < 1e-9);
                }
            }
            assert!((mackey.lp(2.0).unwrap() - f.l2_norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn lp_rejects_small_exponent() {
        let s = Spectrum { values: vec![(1.0, 1.0)], order: 1 };
        assert!(matches!(s.lp(0.5), Err(Error::Domain(_))));
        assert_eq!(s.lp(f64::INFINITY).unwrap(), 1.0);
    }
}
