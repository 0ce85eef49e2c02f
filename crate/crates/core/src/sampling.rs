//! Seeded sampling from trivariate models, conditional probability integral
//! transforms, empirical copulas and rank statistics.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivariate::BivariateCopula;
use crate::error::{CopulaError, Result};
use crate::family::FamilySpec;
use crate::partial::conditional_copula;
use crate::special::{norm_cdf, norm_quantile};
use crate::trivariate::{Given, TrivariateCopula};

/// Identifier of the uniform generator recorded in every [`SampleSet`].
pub const GENERATOR_ID: &str = "chacha20";

/// A ChaCha20 generator for `(seed, stream)`.
pub fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A uniform draw from the open interval `(0, 1)`.
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// A standard normal draw by inversion.
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    norm_quantile(open_uniform(rng))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named columns of equal length plus the seed and generator that produced
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    n: usize,
    columns: Vec<Column>,
    seed: u64,
    generator: String,
}

impl SampleSet {
    pub fn new(n: usize, seed: u64) -> Self {
        SampleSet {
            n,
            columns: Vec::new(),
            seed,
            generator: GENERATOR_ID.to_string(),
        }
    }

    /// Appends a column, replacing any existing one with the same name.
    pub fn push(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.n {
            return Err(CopulaError::InvalidInput(format!(
                "column {name} has {} values, expected {}",
                values.len(),
                self.n
            )));
        }
        match self.columns.iter_mut().find(|c| c.name == name) {
            Some(c) => c.values = values,
            None => self.columns.push(Column {
                name: name.to_string(),
                values,
            }),
        }
        Ok(())
    }

    pub fn with(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        self.push(name, values)?;
        Ok(self)
    }

    /// Copies every column of `other` into `self`.
    pub fn merge(&mut self, other: &SampleSet) -> Result<()> {
        for c in &other.columns {
            self.push(&c.name, c.values.clone())?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// Like [`column`](Self::column) but with an error naming the column.
    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.column(name)
            .ok_or_else(|| CopulaError::InvalidInput(format!("missing column {name}")))
    }
}

/// Draws `n` points of a trivariate model by conditional inversion.
///
/// `u₂` is uniform; the CPIT pair `(v₁, v₃)` is drawn from the conditional
/// copula at `u₂` (`v₁` uniform, `v₃` by inverting its h-function); `u₁` and
/// `u₃` invert the h-functions of the margins with `u₂`.
pub fn sample_trivariate(spec: &FamilySpec, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(CopulaError::InvalidInput("n must be at least 1".into()));
    }
    let cop = TrivariateCopula::new(spec.clone())?;
    let cf = conditional_copula(&cop)?;
    let mut g = rng(seed, 0);
    let draws: Vec<[f64; 3]> = (0..n)
        .map(|_| [open_uniform(&mut g), open_uniform(&mut g), open_uniform(&mut g)])
        .collect();
    let m1 = cop.margin(Given::OneGivenTwo);
    let m3 = cop.margin(Given::ThreeGivenTwo);
    let rows: Vec<Result<[f64; 3]>> = draws
        .par_iter()
        .map(|&[u2, v1, w]| {
            let v3 = cf.at(u2).h1_inv(w, v1)?;
            let u1 = m1.h2_inv(v1, u2)?;
            let u3 = m3.h2_inv(v3, u2)?;
            Ok([u1, u2, u3])
        })
        .collect();
    let mut cols = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for row in rows {
        let row = row?;
        for k in 0..3 {
            cols[k].push(row[k]);
        }
    }
    let [u1, u2, u3] = cols;
    SampleSet::new(n, seed)
        .with("u1", u1)?
        .with("u2", u2)?
        .with("u3", u3)
}

/// `v₁ = F₁|₂(u₁ | u₂)` and `v₃ = F₃|₂(u₃ | u₂)` under the model `spec`.
pub fn cpit(samples: &SampleSet, spec: &FamilySpec) -> Result<SampleSet> {
    let cop = TrivariateCopula::new(spec.clone())?;
    let (u1, u2, u3) = (samples.require("u1")?, samples.require("u2")?, samples.require("u3")?);
    let mut v1 = Vec::with_capacity(samples.n());
    let mut v3 = Vec::with_capacity(samples.n());
    for i in 0..samples.n() {
        v1.push(cop.hfunc(Given::OneGivenTwo, u1[i], u2[i])?);
        v3.push(cop.hfunc(Given::ThreeGivenTwo, u3[i], u2[i])?);
    }
    SampleSet::new(samples.n(), samples.seed())
        .with("v1", v1)?
        .with("v3", v3)
}

/// Average ranks scaled to `(0, 1)` by `n + 1`.
pub fn pseudo_observations(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    ranks(x).into_iter().map(|r| r / (n as f64 + 1.0)).collect()
}

/// 1-based average ranks.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// The empirical copula of a pair of columns, built from scaled ranks.
#[derive(Debug, Clone)]
pub struct EmpiricalCopula {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl EmpiricalCopula {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(CopulaError::InvalidInput("columns differ in length".into()));
        }
        if x.len() < 10 {
            return Err(CopulaError::InvalidInput(format!(
                "empirical copula needs n ≥ 10, got {}",
                x.len()
            )));
        }
        Ok(EmpiricalCopula {
            u: pseudo_observations(x),
            v: pseudo_observations(y),
        })
    }

    pub fn from_columns(samples: &SampleSet, a: &str, b: &str) -> Result<Self> {
        Self::new(samples.require(a)?, samples.require(b)?)
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// `(1/n) Σ 1{Uᵢ ≤ u, Vᵢ ≤ v}`.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let hits = self
            .u
            .iter()
            .zip(&self.v)
            .filter(|(&a, &b)| a <= u && b <= v)
            .count();
        hits as f64 / self.n() as f64
    }

    /// `max |Cₙ(i/m, j/m) − C(i/m, j/m)|` over the `m × m` grid.
    pub fn sup_distance<C: BivariateCopula + ?Sized>(&self, cop: &C, m: usize) -> f64 {
        let counts = self.grid_counts(m);
        let n = self.n() as f64;
        let rows: Vec<f64> = (1..=m)
            .into_par_iter()
            .map(|i| {
                let a = i as f64 / m as f64;
                (1..=m)
                    .map(|j| {
                        let b = j as f64 / m as f64;
                        (counts[(i - 1) * m + (j - 1)] as f64 / n - cop.cdf(a, b)).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        rows.into_iter().fold(0.0, f64::max)
    }

    // counts[(i−1)·m + (j−1)] = #{k : Uₖ ≤ i/m, Vₖ ≤ j/m}
    fn grid_counts(&self, m: usize) -> Vec<u64> {
        let bin = |x: f64| -> usize {
            let mut b = (x * m as f64).ceil().max(1.0) as usize;
            while b > 1 && x <= (b - 1) as f64 / m as f64 {
                b -= 1;
            }
            while x > b as f64 / m as f64 {
                b += 1;
            }
            b
        };
        let mut cells = vec![0u64; m * m];
        for (&a, &b) in self.u.iter().zip(&self.v) {
            cells[(bin(a) - 1) * m + (bin(b) - 1)] += 1;
        }
        for i in 0..m {
            for j in 0..m {
                let mut c = cells[i * m + j];
                if i > 0 {
                    c += cells[(i - 1) * m + j];
                }
                if j > 0 {
                    c += cells[i * m + j - 1];
                }
                if i > 0 && j > 0 {
                    c -= cells[(i - 1) * m + j - 1];
                }
                cells[i * m + j] = c;
            }
        }
        cells
    }
}

/// The empirical copula of columns `a` and `b` at `(u₁, u₂)`.
pub fn empirical_copula(samples: &SampleSet, a: &str, b: &str, u1: f64, u2: f64) -> Result<f64> {
    Ok(EmpiricalCopula::from_columns(samples, a, b)?.eval(u1, u2))
}

/// One-sample Kolmogorov–Smirnov statistic against the uniform law.
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let v = v.clamp(0.0, 1.0);
            ((i as f64 + 1.0) / n - v).max(v - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the Kolmogorov–Smirnov statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Kendall's τ-b in `O(n log n)` (Knight's algorithm).
pub fn sample_kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "columns differ in length");
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
    let pairs = |len: u64| len * len.saturating_sub(1) / 2;

    let mut tied_x = 0u64;
    let mut tied_xy = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        tied_x += pairs((j - i) as u64);
        let mut k = i;
        while k < j {
            let mut l = k + 1;
            while l < j && y[idx[l]] == y[idx[k]] {
                l += 1;
            }
            tied_xy += pairs((l - k) as u64);
            k = l;
        }
        i = j;
    }

    let mut ys: Vec<f64> = idx.iter().map(|&k| y[k]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut tied_y = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && ys[j] == ys[i] {
            j += 1;
        }
        tied_y += pairs((j - i) as u64);
        i = j;
    }

    let total = pairs(n as u64);
    let num = total as f64 - tied_x as f64 - tied_y as f64 + tied_xy as f64 - 2.0 * swaps as f64;
    let den = ((total - tied_x) as f64 * (total - tied_y) as f64).sqrt();
    num / den
}

// Sorts `v` and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    let k = k + mid - i;
    buf[k..n].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Spearman's ρ as the Pearson correlation of average ranks.
pub fn sample_spearman_rho(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = (a - mx, b - my);
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    sxy / (sxx * syy).sqrt()
}

/// Draws `Yᵢ = −1 + Z² + εᵢ` with `Z` standard normal and independent
/// `εᵢ ~ N(0, σ)`, together with the CPITs `uᵢ = Φ(εᵢ/√σ)`.
///
/// Columns: `y1`, `y2`, `z`, `u1`, `u2`.
pub fn quadratic_design(n: usize, sigma: f64, seed: u64) -> Result<SampleSet> {
    if !(sigma > 0.0) {
        return Err(CopulaError::InvalidInput(format!("σ must be positive, got {sigma}")));
    }
    let mut g = rng(seed, 0);
    let sd = sigma.sqrt();
    let mut cols: [Vec<f64>; 5] = Default::default();
    for _ in 0..n {
        let z = standard_normal(&mut g);
        let e1 = sd * standard_normal(&mut g);
        let e2 = sd * standard_normal(&mut g);
        let mean = -1.0 + z * z;
        for (c, v) in cols
            .iter_mut()
            .zip([mean + e1, mean + e2, z, norm_cdf(e1 / sd), norm_cdf(e2 / sd)])
        {
            c.push(v);
        }
    }
    let [y1, y2, z, u1, u2] = cols;
    SampleSet::new(n, seed)
        .with("y1", y1)?
        .with("y2", y2)?
        .with("z", z)?
        .with("u1", u1)?
        .with("u2", u2)
}
