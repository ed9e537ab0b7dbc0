use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitKind {
    Cpmg,
    Udd(u32),
    Custom,
}

/// One π-pulse unit: pulses at `fractions · t` within a unit of length t.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceUnit {
    kind: UnitKind,
    fractions: Vec<f64>,
}

impl SequenceUnit {
    pub fn cpmg() -> Self {
        SequenceUnit {
            kind: UnitKind::Cpmg,
            fractions: vec![0.25, 0.75],
        }
    }

    /// Uhrig spacing: t_k/t = sin²(kπ/(2n+2)), k = 1..n.
    pub fn udd(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPulseFractions("UDD needs at least one pulse".into()));
        }
        let fractions = (1..=n)
            .map(|k| (k as f64 * PI / (2.0 * n as f64 + 2.0)).sin().powi(2))
            .collect();
        Ok(SequenceUnit {
            kind: UnitKind::Udd(n),
            fractions,
        })
    }

    pub fn custom(fractions: Vec<f64>) -> Result<Self> {
        let u = SequenceUnit {
            kind: UnitKind::Custom,
            fractions,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(Error::InvalidPulseFractions("no pulses".into()));
        }
        for f in &self.fractions {
            if !(f.is_finite() && *f > 0.0 && *f < 1.0) {
                return Err(Error::InvalidPulseFractions(format!("{f} not in (0, 1)")));
            }
        }
        if self.fractions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPulseFractions("not strictly increasing".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> UnitKind {
        self.kind
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn pulse_count(&self) -> usize {
        self.fractions.len()
    }

    /// True when one unit leaves the electron flipped.
    pub fn flips_electron(&self) -> bool {
        self.fractions.len() % 2 == 1
    }

    /// Free-evolution segment lengths as fractions of t.
    pub fn segments(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.fractions.len() + 1);
        let mut prev = 0.0;
        for &f in &self.fractions {
            out.push(f - prev);
            prev = f;
        }
        out.push(1.0 - prev);
        out
    }

    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        if lower == "cpmg" {
            return Ok(Self::cpmg());
        }
        if let Some(n) = lower.strip_prefix("udd") {
            let n = n.trim_start_matches(['-', '_', '(']).trim_end_matches(')');
            let n: u32 = n
                .parse()
                .map_err(|_| Error::Config(format!("bad UDD order in `{name}`")))?;
            return Self::udd(n);
        }
        Err(Error::Config(format!("unknown sequence unit `{name}`")))
    }
}

impl fmt::Display for SequenceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            UnitKind::Cpmg => write!(f, "cpmg"),
            UnitKind::Udd(n) => write!(f, "udd{n}"),
            UnitKind::Custom => {
                let parts: Vec<String> = self.fractions.iter().map(|x| x.to_string()).collect();
                write!(f, "custom[{}]", parts.join(";"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceBlock {
    pub unit: SequenceUnit,
    /// Unit time in seconds.
    pub t: f64,
    pub n: u64,
}

impl SequenceBlock {
    pub fn new(unit: SequenceUnit, t: f64, n: u64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidSequence(format!("unit time must be positive, got {t}")));
        }
        if n == 0 {
            return Err(Error::InvalidSequence("iterations must be at least 1".into()));
        }
        unit.validate()?;
        Ok(SequenceBlock { unit, t, n })
    }

    pub fn duration(&self) -> f64 {
        self.n as f64 * self.t
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SequencePlan {
    pub blocks: Vec<SequenceBlock>,
}

impl SequencePlan {
    pub fn new(blocks: Vec<SequenceBlock>) -> Self {
        SequencePlan { blocks }
    }

    pub fn single(block: SequenceBlock) -> Self {
        SequencePlan { blocks: vec![block] }
    }

    pub fn total_time(&self) -> f64 {
        self.blocks.iter().map(SequenceBlock::duration).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for b in &self.blocks {
            SequenceBlock::new(b.unit.clone(), b.t, b.n)?;
        }
        Ok(())
    }
}
