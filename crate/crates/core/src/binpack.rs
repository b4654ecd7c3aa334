//! Bin-packing: `N` items, `N` candidate bins of capacity `c`, one agent per
//! item choosing its bin.
//!
//! Performance is the number of occupied bins. Search drives the soft
//! objective instead, which sums a per-bin term that vanishes for empty and
//! exactly full bins:
//!
//! ```text
//! term(x) = (c/2)^2 - (x - c/2)^2   if x <= c
//!         = (x - c/2)^2             if x >  c
//! ```
//!
//! Both are minimized.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ClampKind, JointState, Problem, Sense};

/// Summed item size per bin.
pub type BinLoads = Vec<f64>;

/// How item sizes are drawn when generating an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeDistribution {
    /// Integers uniform on `[min, max]`.
    UniformInt { min: u32, max: u32 },
    /// Reals uniform on `[low, high)`.
    Uniform { low: f64, high: f64 },
}

impl SizeDistribution {
    /// Uniform integers on `[1, max(1, floor(c / 4))]`.
    pub fn default_for(capacity: f64) -> Self {
        SizeDistribution::UniformInt {
            min: 1,
            max: ((capacity / 4.0).floor() as u32).max(1),
        }
    }

    fn validate(&self, capacity: f64) -> Result<()> {
        let ok = match *self {
            SizeDistribution::UniformInt { min, max } => min >= 1 && min <= max && (min as f64) < capacity,
            SizeDistribution::Uniform { low, high } => low >= 0.0 && low < high && low < capacity,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "size distribution {self:?} cannot produce sizes in (0, {capacity})"
            )))
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SizeDistribution::UniformInt { min, max } => rng.random_range(min..=max) as f64,
            SizeDistribution::Uniform { low, high } => rng.random_range(low..high),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinPackInstance {
    capacity: f64,
    sizes: Vec<f64>,
}

impl BinPackInstance {
    pub fn new(capacity: f64, sizes: Vec<f64>) -> Result<Self> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(Error::config(format!("capacity {capacity} must be positive")));
        }
        if sizes.is_empty() {
            return Err(Error::config("bin-packing instance needs at least one item"));
        }
        if let Some((i, s)) = sizes.iter().enumerate().find(|(_, &s)| !(s > 0.0 && s < capacity)) {
            return Err(Error::config(format!("item {i} has size {s}, outside (0, {capacity})")));
        }
        Ok(BinPackInstance { capacity, sizes })
    }

    /// Draws `n` sizes from `dist`, redrawing any that reach the capacity.
    pub fn generate(n: usize, capacity: f64, dist: SizeDistribution, seed: u64) -> Result<Self> {
        dist.validate(capacity)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = (0..n)
            .map(|_| loop {
                let s = dist.draw(&mut rng);
                if s > 0.0 && s < capacity {
                    break s;
                }
            })
            .collect();
        Self::new(capacity, sizes)
    }

    pub fn item_count(&self) -> usize {
        self.sizes.len()
    }

    /// One candidate bin per item.
    pub fn bin_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    /// `ceil(sum of sizes / c)`, a lower bound on any feasible packing.
    pub fn lower_bound(&self) -> usize {
        (self.sizes.iter().sum::<f64>() / self.capacity).ceil() as usize
    }

    pub fn loads(&self, z: &JointState) -> BinLoads {
        self.loads_skipping(z, usize::MAX)
    }

    /// Loads with item `skip` taken out of every bin.
    fn loads_skipping(&self, z: &JointState, skip: usize) -> BinLoads {
        let mut x = vec![0.0; self.bin_count()];
        for (item, (&bin, &size)) in z.moves().iter().zip(&self.sizes).enumerate() {
            if item != skip {
                x[bin] += size;
            }
        }
        x
    }

    /// Loads with `item` removed: the zero vector for its bin membership.
    pub fn clamp_loads(&self, z: &JointState, item: usize) -> BinLoads {
        self.loads_skipping(z, item)
    }

    /// Loads with `item` spread evenly over all bins, its expected membership
    /// under a uniform choice of bin.
    pub fn meanfield_loads(&self, z: &JointState, item: usize) -> BinLoads {
        let mut x = self.loads_skipping(z, item);
        let share = self.sizes[item] / self.bin_count() as f64;
        x.iter_mut().for_each(|v| *v += share);
        x
    }

    /// Number of occupied bins.
    pub fn g_bins(&self, z: &JointState) -> usize {
        let mut used = vec![false; self.bin_count()];
        for &b in z.moves() {
            used[b] = true;
        }
        used.into_iter().filter(|&u| u).count()
    }

    pub fn g_soft(&self, loads: &[f64]) -> f64 {
        loads.iter().map(|&x| soft_term(x, self.capacity)).sum()
    }

    pub fn meanfield_g(&self, z: &JointState, item: usize) -> f64 {
        self.g_soft(&self.meanfield_loads(z, item))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses `N c` on the first line followed by one size per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty instance file".into(),
        })?;
        let bad = |line, msg: String| Error::Parse { line, msg };
        let mut fields = header.split_whitespace();
        let (Some(n), Some(c), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad(line, format!("expected `N c`, found `{header}`")));
        };
        let n: usize = n.parse().map_err(|_| bad(line, format!("bad item count `{n}`")))?;
        let c: f64 = c.parse().map_err(|_| bad(line, format!("bad capacity `{c}`")))?;
        let sizes = lines
            .map(|(line, l)| l.parse::<f64>().map_err(|_| bad(line, format!("bad size `{l}`"))))
            .collect::<Result<Vec<f64>>>()?;
        if sizes.len() != n {
            return Err(bad(line, format!("header says {n} items, found {}", sizes.len())));
        }
        Self::new(c, sizes)
    }

    /// Inverse of [`BinPackInstance::parse`]. Uses the shortest round-trip
    /// decimal form, so integer sizes print without a fractional part.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.item_count(), self.capacity);
        for size in &self.sizes {
            let _ = writeln!(s, "{size}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Per-bin soft objective term.
pub fn soft_term(x: f64, capacity: f64) -> f64 {
    let half = capacity / 2.0;
    if x <= capacity {
        half * half - (x - half) * (x - half)
    } else {
        (x - half) * (x - half)
    }
}

impl Problem for BinPackInstance {
    fn agent_count(&self) -> usize {
        self.item_count()
    }

    fn move_count(&self, _agent: usize) -> usize {
        self.bin_count()
    }

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn objective(&self, z: &JointState) -> f64 {
        self.g_soft(&self.loads(z))
    }

    fn reported(&self, z: &JointState) -> f64 {
        self.g_bins(z) as f64
    }

    /// `Zero` and `Absent` both take the item out of the packing.
    fn clamped_objective(&self, z: &JointState, agent: usize, clamp: ClampKind) -> Result<f64> {
        match clamp {
            ClampKind::Zero | ClampKind::Absent => Ok(self.g_soft(&self.clamp_loads(z, agent))),
            ClampKind::Move(bin) if bin < self.bin_count() => {
                let mut x = self.clamp_loads(z, agent);
                x[bin] += self.sizes[agent];
                Ok(self.g_soft(&x))
            }
            ClampKind::Move(bin) => Err(Error::config(format!(
                "clamp bin {bin} out of range for {} bins",
                self.bin_count()
            ))),
        }
    }

    fn meanfield_objective(&self, z: &JointState, agent: usize) -> f64 {
        self.meanfield_g(z, agent)
    }
}
