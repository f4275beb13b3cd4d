//! Reproducible parallel Monte-Carlo reductions.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` uses the ChaCha stream
//! `c` of the generator seeded with `seed`. Chunk partial sums are combined in
//! chunk order with compensated summation, so results depend only on
//! `(seed, samples, chunk size)` and not on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Generator for stream `stream` of the base seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Kahan-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub const CHUNK: usize = 4096;

/// Running count, mean and centred sum of squares.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }

    fn estimate(self) -> McEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n as f64 - 1.0)
        } else {
            0.0
        };
        McEstimate {
            mean: if self.n > 0 { self.mean } else { f64::NAN },
            std_error: (var / self.n.max(1) as f64).sqrt(),
            samples: self.n,
        }
    }
}

/// Parallel mean of `draw(rng)` over `samples` draws, with chunked streams.
pub fn chunked_mean<F>(samples: usize, seed: u64, draw: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..n {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    partial
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .estimate()
}

/// Mean and standard error of a slice of values, with compensated two-pass sums.
pub fn mean_of(values: &[f64]) -> McEstimate {
    let n = values.len();
    let mut s = KahanSum::default();
    for &v in values {
        s.add(v);
    }
    let mean = s.value() / n.max(1) as f64;
    let mut s2 = KahanSum::default();
    for &v in values {
        s2.add((v - mean) * (v - mean));
    }
    Moments {
        n,
        mean,
        m2: s2.value(),
    }
    .estimate()
}
