//! Correlation versus bit-ratio sweeps.

use alloc::vec::Vec;

use super::cca::{cca_first_correlation, MIN_EXTRA_SAMPLES};
use super::dataset::{sample_dataset, DatasetSpec, PadMode, Scheme};
use super::stats::spearman;
use super::LabError;
use crate::random::substream;

const STREAM_LABEL: &str = "tagseal/curve";

/// Which cells to run. One cell per (scheme, encrypted, b, ratio, seed).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    pub b_list: Vec<u32>,
    /// `B / b`; the budget is `round(ratio * b)`.
    pub ratio_list: Vec<f64>,
    pub samples: usize,
    pub schemes: Vec<Scheme>,
    pub encrypted_modes: Vec<bool>,
    pub pad_mode: PadMode,
    pub seeds: Vec<u64>,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            b_list: alloc::vec![10, 30, 100],
            ratio_list: (2..=10).map(f64::from).collect(),
            samples: 10_000,
            schemes: Scheme::ALL.to_vec(),
            encrypted_modes: alloc::vec![false],
            pad_mode: PadMode::Fresh,
            seeds: (0..20).collect(),
        }
    }
}

impl CurveConfig {
    /// Smaller sweep: `T = 2000`, `b` in {10, 30}.
    pub fn quick() -> Self {
        Self {
            b_list: alloc::vec![10, 30],
            samples: 2_000,
            ..Self::default()
        }
    }

    pub fn budget_for(bit_width: u32, ratio: f64) -> Result<u32, LabError> {
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(LabError::InvalidRatio(ratio));
        }
        let budget = libm::round(ratio * f64::from(bit_width));
        if budget > f64::from(u32::MAX) {
            return Err(LabError::InvalidRatio(ratio));
        }
        Ok(budget as u32)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.b_list.is_empty()
            || self.ratio_list.is_empty()
            || self.schemes.is_empty()
            || self.encrypted_modes.is_empty()
            || self.seeds.is_empty()
        {
            return Err(LabError::EmptySweep);
        }
        for cell in self.cells()? {
            cell.spec().validate()?;
            let needed = cell.budget as usize + MIN_EXTRA_SAMPLES + 1;
            if self.samples < needed {
                return Err(LabError::InsufficientSamples {
                    samples: self.samples,
                    needed,
                });
            }
        }
        Ok(())
    }

    /// Cells in report order: scheme, encrypted, b, ratio, seed.
    pub fn cells(&self) -> Result<Vec<CurveCell>, LabError> {
        let mut cells = Vec::new();
        for &scheme in &self.schemes {
            for &encrypted in &self.encrypted_modes {
                for &b in &self.b_list {
                    for &ratio in &self.ratio_list {
                        let budget = Self::budget_for(b, ratio)?;
                        for &seed in &self.seeds {
                            cells.push(CurveCell {
                                scheme,
                                encrypted,
                                pad_mode: self.pad_mode,
                                bit_width: b,
                                budget,
                                samples: self.samples,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// One point of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveCell {
    pub scheme: Scheme,
    pub encrypted: bool,
    pub pad_mode: PadMode,
    pub bit_width: u32,
    pub budget: u32,
    pub samples: usize,
    pub seed: u64,
}

impl CurveCell {
    pub fn spec(&self) -> DatasetSpec {
        DatasetSpec {
            scheme: self.scheme,
            bit_width: self.bit_width,
            budget: self.budget,
            samples: self.samples,
            encrypted: self.encrypted,
            pad_mode: self.pad_mode,
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub scheme: Scheme,
    pub encrypted: bool,
    pub bit_width: u32,
    pub budget: u32,
    pub samples: usize,
    pub seed: u64,
    pub rho: f64,
}

impl ReportRow {
    pub fn ratio(&self) -> f64 {
        f64::from(self.budget) / f64::from(self.bit_width)
    }
}

/// Run a single cell.
///
/// The generator depends on `(seed, b, B)` only, so the two schemes and the
/// plain and encrypted variants of a cell see the same tags, and the
/// encrypted variants of both schemes see the same pads.
pub fn run_cell(cell: &CurveCell) -> Result<ReportRow, LabError> {
    let mut rng = substream(
        STREAM_LABEL,
        cell.seed,
        &[u64::from(cell.bit_width), u64::from(cell.budget)],
    );
    let data = sample_dataset(&cell.spec(), &mut rng)?;
    let rho = cca_first_correlation(&data.x, &data.y)?;
    Ok(ReportRow {
        scheme: cell.scheme,
        encrypted: cell.encrypted,
        bit_width: cell.bit_width,
        budget: cell.budget,
        samples: cell.samples,
        seed: cell.seed,
        rho,
    })
}

/// Rows in [`CurveConfig::cells`] order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrelationReport {
    pub rows: Vec<ReportRow>,
}

/// `rho(fixed-bits) / rho(quadratic)` at one (encrypted, b, B, seed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeRatio {
    pub encrypted: bool,
    pub bit_width: u32,
    pub budget: u32,
    pub seed: u64,
    pub ratio: f64,
}

impl CorrelationReport {
    pub fn find(
        &self,
        scheme: Scheme,
        encrypted: bool,
        bit_width: u32,
        budget: u32,
        seed: u64,
    ) -> Option<&ReportRow> {
        self.rows.iter().find(|r| {
            r.scheme == scheme
                && r.encrypted == encrypted
                && r.bit_width == bit_width
                && r.budget == budget
                && r.seed == seed
        })
    }

    /// Spearman correlation of `B/b` against `rho` along one curve.
    pub fn trend(&self, scheme: Scheme, encrypted: bool, bit_width: u32, seed: u64) -> Option<f64> {
        let (ratios, rhos): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| {
                r.scheme == scheme
                    && r.encrypted == encrypted
                    && r.bit_width == bit_width
                    && r.seed == seed
            })
            .map(|r| (r.ratio(), r.rho))
            .unzip();
        spearman(&ratios, &rhos)
    }

    /// Fixed-bits over quadratic for every quadratic row with a partner.
    pub fn scheme_ratios(&self) -> Vec<SchemeRatio> {
        self.rows
            .iter()
            .filter(|r| r.scheme == Scheme::Quadratic)
            .filter_map(|q| {
                let f = self.find(
                    Scheme::FixedBits,
                    q.encrypted,
                    q.bit_width,
                    q.budget,
                    q.seed,
                )?;
                Some(SchemeRatio {
                    encrypted: q.encrypted,
                    bit_width: q.bit_width,
                    budget: q.budget,
                    seed: q.seed,
                    ratio: f.rho / q.rho,
                })
            })
            .collect()
    }
}

/// Run every cell of `config` one after another.
pub fn run_curve_experiment(config: &CurveConfig) -> Result<CorrelationReport, LabError> {
    config.validate()?;
    let rows = config
        .cells()?
        .iter()
        .map(run_cell)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CorrelationReport { rows })
}
