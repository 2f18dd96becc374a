use alloc::vec::Vec;

use rand::Rng;

use super::distribution::EnvDistribution;
use super::environment::{sample_block, SampleOptions};
use crate::error::Result;
use crate::math::{exp, log};

/// Statistics of one block [ν_k, ν_{k+1}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub length: usize,
    pub beta: f64,
    pub max_increase: f64,
}

/// Consecutive blocks of a Q-environment, produced one at a time without
/// storing the environment. W is carried across blocks; the first
/// `burn_in` blocks only serve to settle it and are discarded.
pub struct BlockStream<'a, R> {
    dist: &'a EnvDistribution,
    rng: R,
    w: f64,
    buf: Vec<f64>,
    opts: SampleOptions,
}

impl<'a, R: Rng> BlockStream<'a, R> {
    pub fn new(dist: &'a EnvDistribution, rng: R, burn_in: usize, opts: SampleOptions) -> Result<Self> {
        let mut s = Self { dist, rng, w: 0.0, buf: Vec::new(), opts };
        for _ in 0..burn_in {
            s.next_block()?;
        }
        Ok(s)
    }

    pub fn next_block(&mut self) -> Result<Block> {
        self.buf.clear();
        sample_block(self.dist, &mut self.rng, self.opts.block_cap, &mut self.buf)?;
        let mut total = 0.0;
        let mut v = 0.0;
        let mut vmax = f64::NEG_INFINITY;
        for &om in &self.buf {
            let rho = (1.0 - om) / om;
            self.w = rho * (1.0 + self.w);
            total += self.w;
            v += log(rho);
            vmax = vmax.max(v);
        }
        Ok(Block {
            length: self.buf.len(),
            beta: self.buf.len() as f64 + 2.0 * total,
            max_increase: exp(vmax),
        })
    }

    /// ω values of the block produced last.
    pub fn last_block_omega(&self) -> &[f64] {
        &self.buf
    }
}
