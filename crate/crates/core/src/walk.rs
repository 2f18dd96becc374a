//! Single nearest-neighbour walks in a fixed environment.

use rand::Rng;

use crate::env::Environment;
use crate::error::{Error, Result};

#[inline]
pub fn step<R: Rng + ?Sized>(env: &Environment, x: i64, rng: &mut R) -> i64 {
    if rng.random::<f64>() < env.omega(x) {
        x + 1
    } else {
        x - 1
    }
}

/// Steps needed to go from `start` to `target > start`. Errors if the walk
/// leaves the window on the left.
pub fn hitting_time<R: Rng + ?Sized>(env: &Environment, start: i64, target: i64, rng: &mut R) -> Result<u64> {
    if target <= start || !env.contains(start) || target > env.x_max() + 1 {
        return Err(Error::InvalidArgument("need start < target inside the window"));
    }
    let mut x = start;
    let mut n = 0u64;
    while x < target {
        if x < env.x_min() {
            return Err(Error::WindowExit { t: n as f64 });
        }
        x = step(env, x, rng);
        n += 1;
    }
    Ok(n)
}

/// Visits to `x` (counting time 0) of a walk started at `x`, stopped when it
/// reaches `stop > x`, and the number of steps taken. With `stop` far to the
/// right the visit count estimates g(x).
pub fn visits_before<R: Rng + ?Sized>(env: &Environment, x: i64, stop: i64, rng: &mut R) -> Result<(u64, u64)> {
    if stop <= x || stop > env.x_max() + 1 {
        return Err(Error::InvalidArgument("need x < stop <= x_max + 1"));
    }
    let mut pos = x;
    let mut visits = 1u64;
    let mut n = 0u64;
    loop {
        if pos < env.x_min() {
            return Err(Error::WindowExit { t: n as f64 });
        }
        pos = step(env, pos, rng);
        n += 1;
        if pos == stop {
            return Ok((visits, n));
        }
        if pos == x {
            visits += 1;
        }
    }
}

/// Position after `steps` steps, or `WindowExit` if the walk leaves the window.
pub fn position_after<R: Rng + ?Sized>(env: &Environment, start: i64, steps: u64, rng: &mut R) -> Result<i64> {
    let mut x = start;
    for n in 0..steps {
        if !env.contains(x) {
            return Err(Error::WindowExit { t: n as f64 });
        }
        x = step(env, x, rng);
    }
    Ok(x)
}
