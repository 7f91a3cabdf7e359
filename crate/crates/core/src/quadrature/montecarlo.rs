//! Dirichlet importance sampling.
//!
//! Samples are drawn in fixed chunks; chunk `c` of a call owns its own
//! ChaCha8 block, so the estimate is identical whether chunks run
//! sequentially or on the rayon pool.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use super::simplex::{SimplexPoint, MAX_DIM};
use super::QuadResult;
use crate::error::{domain, Error, Result};
use crate::parallel::{map_indexed, Execution};

const CHUNK: usize = 4096;

/// Reproducible position in a counter-based random stream.
///
/// `position` counts consumed blocks; each block is an independent
/// `2^32`-word window of the ChaCha8 stream selected by `(seed, stream)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
    pub position: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState {
            seed,
            stream: 0,
            position: 0,
        }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        RngState {
            seed,
            stream,
            position: 0,
        }
    }

    /// Independent substream labelled `label`, e.g. a trial index.
    pub fn fork(&self, label: u64) -> Self {
        let stream = splitmix(self.stream ^ splitmix(label.wrapping_add(0x5851_f42d_4c95_7f2d)));
        RngState {
            seed: self.seed,
            stream,
            position: 0,
        }
    }

    /// Generator for block `position + offset`; does not advance `self`.
    pub fn block(&self, offset: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(u128::from(self.position + offset) << 32);
        rng
    }

    /// Takes the next block and advances the position.
    pub fn next_block(&mut self) -> ChaCha8Rng {
        let rng = self.block(0);
        self.position += 1;
        rng
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Log of a Gamma(α, 1) variate. Small shapes use `G_{α+1}·U^{1/α}` in log
/// form so tiny variates do not underflow.
struct LogGamma {
    alpha: f64,
    dist: Gamma<f64>,
    boosted: bool,
}

impl LogGamma {
    fn new(alpha: f64) -> Result<Self> {
        let boosted = alpha < 1.0;
        let shape = if boosted { alpha + 1.0 } else { alpha };
        let dist = Gamma::new(shape, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(LogGamma {
            alpha,
            dist,
            boosted,
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let g: f64 = self.dist.sample(rng);
        if self.boosted {
            let u: f64 = rng.random();
            g.ln() + (1.0 - u).ln() / self.alpha
        } else {
            g.ln()
        }
    }
}

fn samplers(alpha: &[f64]) -> Result<Vec<LogGamma>> {
    let n = alpha.len();
    if !(2..=MAX_DIM).contains(&n) {
        return domain(format!("Dirichlet dimension {n} outside 2..={MAX_DIM}"));
    }
    if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return domain("Dirichlet parameters must be positive and finite");
    }
    alpha.iter().map(|&a| LogGamma::new(a)).collect()
}

fn draw<R: Rng>(gens: &[LogGamma], rng: &mut R) -> SimplexPoint {
    let mut l = [0.0; MAX_DIM];
    let n = gens.len();
    for (li, g) in l.iter_mut().zip(gens) {
        *li = g.sample(rng);
    }
    let m = l[..n].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for li in &mut l[..n] {
        *li = (*li - m).exp();
        s += *li;
    }
    for li in &mut l[..n] {
        *li /= s;
    }
    SimplexPoint::from_full(&l[..n])
}

/// One Dirichlet(α) draw from the next block of `rng`.
pub fn sample_dirichlet(alpha: &[f64], rng: &mut RngState) -> Result<SimplexPoint> {
    let gens = samplers(alpha)?;
    Ok(draw(&gens, &mut rng.next_block()))
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.count == 0.0 {
            return o;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * o.count / count,
            m2: self.m2 + o.m2 + d * d * self.count * o.count / count,
        }
    }
}

/// `E_{T∼Dirichlet(α)}[g(T)]` from `samples` draws, on the default
/// execution mode.
pub fn mc_dirichlet<G>(
    alpha: &[f64],
    g: G,
    samples: usize,
    rng: &mut RngState,
) -> Result<QuadResult>
where
    G: Fn(&SimplexPoint) -> f64 + Sync,
{
    mc_dirichlet_with(alpha, g, samples, rng, Execution::default())
}

/// As [`mc_dirichlet`] with an explicit execution mode. The result does not
/// depend on `exec`.
pub fn mc_dirichlet_with<G>(
    alpha: &[f64],
    g: G,
    samples: usize,
    rng: &mut RngState,
    exec: Execution,
) -> Result<QuadResult>
where
    G: Fn(&SimplexPoint) -> f64 + Sync,
{
    mc_dirichlet_try(alpha, |t| Ok(g(t)), samples, rng, exec)
}

/// Monte Carlo core for integrands that may fail.
pub(crate) fn mc_dirichlet_try<G>(
    alpha: &[f64],
    g: G,
    samples: usize,
    rng: &mut RngState,
    exec: Execution,
) -> Result<QuadResult>
where
    G: Fn(&SimplexPoint) -> Result<f64> + Sync,
{
    if samples < 2 {
        return domain(format!(
            "Monte Carlo needs at least 2 samples, got {samples}"
        ));
    }
    let gens = samplers(alpha)?;
    let chunks = samples.div_ceil(CHUNK);
    let base = *rng;
    let parts = map_indexed(chunks, exec, |c| {
        let mut r = base.block(c as u64);
        let len = CHUNK.min(samples - c * CHUNK);
        let mut m = Moments::default();
        for _ in 0..len {
            let v = g(&draw(&gens, &mut r))?;
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            m.push(v);
        }
        Ok(m)
    });
    rng.position += chunks as u64;
    let mut total = Moments::default();
    for p in parts {
        total = total.merge(p?);
    }
    let var = (total.m2 / (total.count - 1.0)).max(0.0);
    let stderr = (var / total.count).sqrt();
    Ok(QuadResult::monte_carlo(total.mean, stderr, samples as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_stderr() {
        let mut rng = RngState::new(1);
        let r = mc_dirichlet(&[1.0, 2.0], |_| 1.0, 1000, &mut rng).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!(r.stderr.unwrap() < 1e-12);
        assert_eq!(rng.position, 1);
    }

    #[test]
    fn samples_lie_on_simplex() {
        let mut rng = RngState::new(7);
        for _ in 0..100 {
            let t = sample_dirichlet(&[0.07, 0.3, 2.0], &mut rng).unwrap();
            let s: f64 = t.coords().iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            assert!(t.coords().iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn execution_mode_does_not_change_result() {
        let g = |t: &SimplexPoint| t.coords()[0].powi(2);
        let mut r1 = RngState::new(3);
        let mut r2 = RngState::new(3);
        let a =
            mc_dirichlet_with(&[1.5, 2.5, 0.5], g, 20_000, &mut r1, Execution::Sequential).unwrap();
        let b =
            mc_dirichlet_with(&[1.5, 2.5, 0.5], g, 20_000, &mut r2, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(r1, r2);
    }

    #[test]
    fn forks_differ() {
        let s = RngState::new(9);
        assert_ne!(s.fork(0).stream, s.fork(1).stream);
        assert_eq!(s.fork(4), s.fork(4));
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let mut rng = RngState::new(1);
        assert_eq!(
            mc_dirichlet(&[1.0, 1.0], |_| f64::NAN, 10, &mut rng),
            Err(Error::NonFinite)
        );
    }
}
