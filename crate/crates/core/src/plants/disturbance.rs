//! External disturbance profiles for the four channels `D_1..D_4`.
//!
//! Every channel is bounded by `|magnitude|`. The noise profile is a sum of
//! sinusoids with random frequencies, phases and weights drawn from a ChaCha
//! stream seeded by `(seed, channel)`. It is smooth, band-limited and
//! reproducible, and its bound holds because the weights sum to one.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// Number of sinusoids in a noise channel.
const NOISE_COMPONENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DisturbanceKind {
    #[default]
    Off,
    Constant,
    Step {
        t_on: f64,
    },
    Sine {
        freq_hz: f64,
    },
    /// Band-limited noise with components in `(0, bandwidth_hz]`.
    Noise {
        bandwidth_hz: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelProfile {
    pub kind: DisturbanceKind,
    /// Signed level; `|magnitude|` bounds the channel.
    pub magnitude: f64,
}

impl ChannelProfile {
    pub fn constant(magnitude: f64) -> Self {
        ChannelProfile {
            kind: DisturbanceKind::Constant,
            magnitude,
        }
    }

    pub fn step(t_on: f64, magnitude: f64) -> Self {
        ChannelProfile {
            kind: DisturbanceKind::Step { t_on },
            magnitude,
        }
    }

    pub fn sine(freq_hz: f64, amplitude: f64) -> Self {
        ChannelProfile {
            kind: DisturbanceKind::Sine { freq_hz },
            magnitude: amplitude,
        }
    }

    pub fn noise(bandwidth_hz: f64, magnitude: f64) -> Self {
        ChannelProfile {
            kind: DisturbanceKind::Noise { bandwidth_hz },
            magnitude,
        }
    }

    pub fn is_off(&self) -> bool {
        self.kind == DisturbanceKind::Off || self.magnitude == 0.0
    }

    pub fn validate(&self, channel: usize) -> Result<()> {
        let name = ["d1", "d2", "d3", "d4"][channel.min(3)];
        if !self.magnitude.is_finite() {
            return Err(invalid(name, "magnitude must be finite"));
        }
        match self.kind {
            DisturbanceKind::Step { t_on } if !(t_on.is_finite() && t_on >= 0.0) => {
                Err(invalid(name, "t_on must be >= 0"))
            }
            DisturbanceKind::Sine { freq_hz } if !(freq_hz.is_finite() && freq_hz >= 0.0) => {
                Err(invalid(name, "frequency must be >= 0"))
            }
            DisturbanceKind::Noise { bandwidth_hz } if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) => {
                Err(invalid(name, "bandwidth must be > 0"))
            }
            _ => Ok(()),
        }
    }

    /// Same profile with the level multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ChannelProfile {
            magnitude: self.magnitude * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DisturbanceProfile {
    pub channels: [ChannelProfile; 4],
}

impl DisturbanceProfile {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_off(&self) -> bool {
        self.channels.iter().all(ChannelProfile::is_off)
    }

    pub fn validate(&self) -> Result<()> {
        self.channels.iter().enumerate().try_for_each(|(i, c)| c.validate(i))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DisturbanceProfile {
            channels: self.channels.map(|c| c.scaled(factor)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Tone {
    weight: f64,
    omega: f64,
    phase: f64,
}

/// A profile bound to a seed, ready to sample.
#[derive(Debug, Clone)]
pub struct DisturbanceSource {
    profile: DisturbanceProfile,
    tones: [[Tone; NOISE_COMPONENTS]; 4],
}

impl DisturbanceSource {
    pub fn new(profile: DisturbanceProfile, seed: u64) -> Self {
        let blank = Tone {
            weight: 0.0,
            omega: 0.0,
            phase: 0.0,
        };
        let mut tones = [[blank; NOISE_COMPONENTS]; 4];
        for (channel, slot) in tones.iter_mut().enumerate() {
            if let DisturbanceKind::Noise { bandwidth_hz } = profile.channels[channel].kind {
                *slot = noise_tones(seed, channel as u64, bandwidth_hz);
            }
        }
        DisturbanceSource { profile, tones }
    }

    pub fn profile(&self) -> &DisturbanceProfile {
        &self.profile
    }

    pub fn sample(&self, t: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (j, slot) in out.iter_mut().enumerate() {
            let ch = self.profile.channels[j];
            *slot = match ch.kind {
                DisturbanceKind::Off => 0.0,
                DisturbanceKind::Constant => ch.magnitude,
                DisturbanceKind::Step { t_on } => {
                    if t >= t_on {
                        ch.magnitude
                    } else {
                        0.0
                    }
                }
                DisturbanceKind::Sine { freq_hz } => ch.magnitude * (TAU * freq_hz * t).sin(),
                DisturbanceKind::Noise { .. } => {
                    let s: f64 = self.tones[j]
                        .iter()
                        .map(|tone| tone.weight * (tone.omega * t + tone.phase).sin())
                        .sum();
                    ch.magnitude * s.clamp(-1.0, 1.0)
                }
            };
        }
        out
    }
}

fn noise_tones(seed: u64, channel: u64, bandwidth_hz: f64) -> [Tone; NOISE_COMPONENTS] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(channel + 1);
    let mut tones = [Tone {
        weight: 0.0,
        omega: 0.0,
        phase: 0.0,
    }; NOISE_COMPONENTS];
    for tone in &mut tones {
        tone.weight = rng.random_range(0.1..1.0);
        tone.omega = TAU * bandwidth_hz * rng.random_range(0.05..=1.0);
        tone.phase = rng.random_range(0.0..TAU);
    }
    let total: f64 = tones.iter().map(|t| t.weight).sum();
    for tone in &mut tones {
        tone.weight /= total;
    }
    tones
}

/// One-shot sample; prefer [`DisturbanceSource`] inside loops.
pub fn sample_disturbance(profile: &DisturbanceProfile, t: f64, seed: u64) -> [f64; 4] {
    DisturbanceSource::new(*profile, seed).sample(t)
}
