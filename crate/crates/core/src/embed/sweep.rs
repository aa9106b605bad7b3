use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{train_strategy, InitStrategy, StrategyRun, TrainConfig, VectorTable};
use crate::corpus::PeriodSlice;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub dim: usize,
    pub epochs: usize,
    pub delta_mu: f64,
    pub rho: f64,
}

/// Evaluation metrics over a grid of embedding sizes and epoch counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub strategy: InitStrategy,
    pub dims: Vec<usize>,
    pub epochs: Vec<usize>,
    /// Row-major over `dims` x `epochs`.
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn cell(&self, dim: usize, epochs: usize) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.dim == dim && c.epochs == epochs)
    }

    /// CSV with header `strategy,dim,epochs,delta_mu,rho`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["strategy", "dim", "epochs", "delta_mu", "rho"])?;
        for c in &self.cells {
            w.write_record([
                self.strategy.as_str().to_string(),
                c.dim.to_string(),
                c.epochs.to_string(),
                c.delta_mu.to_string(),
                c.rho.to_string(),
            ])?;
        }
        w.flush().map_err(|e| crate::Error::Csv(e.into()))?;
        Ok(())
    }
}

fn dedup(values: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Trains `strategy` at every `(dim, epochs)` grid point and evaluates the
/// resulting period spaces with `eval`, which returns `(delta_mu, rho)`.
/// Repeated grid values are evaluated once.
pub fn sweep<F>(
    slices: &[PeriodSlice],
    strategy: InitStrategy,
    dims: &[usize],
    epoch_grid: &[usize],
    base: &TrainConfig,
    pretrained: Option<&VectorTable>,
    mut eval: F,
) -> Result<SweepReport>
where
    F: FnMut(&StrategyRun) -> Result<(f64, f64)>,
{
    let dims = dedup(dims);
    let epochs = dedup(epoch_grid);
    let mut cells = Vec::with_capacity(dims.len() * epochs.len());
    for &dim in &dims {
        for &ep in &epochs {
            let config = base.clone().with_dim(dim).with_epochs(ep);
            let run = train_strategy(strategy, slices, &config, pretrained)?;
            let (delta_mu, rho) = eval(&run)?;
            log::info!("sweep {strategy} dim={dim} epochs={ep}: delta_mu={delta_mu:.4} rho={rho:.4}");
            cells.push(SweepCell {
                dim,
                epochs: ep,
                delta_mu,
                rho,
            });
        }
    }
    Ok(SweepReport {
        strategy,
        dims,
        epochs,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PeriodSlice, PeriodSpec};

    fn slices() -> Vec<PeriodSlice> {
        let sents: Vec<Vec<String>> = (0..8)
            .map(|_| "ego rex dedi terram".split(' ').map(str::to_string).collect())
            .collect();
        PeriodSpec::deeds_defaults()[..2]
            .iter()
            .cloned()
            .map(|p| PeriodSlice::new(p, sents.clone(), 1))
            .collect()
    }

    fn base() -> TrainConfig {
        TrainConfig {
            bucket_count: 16,
            seed: 2,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn full_grid_with_zero_eval() {
        let report = sweep(&slices(), InitStrategy::Incremental, &[4, 6], &[1, 2, 3], &base(), None, |_| Ok((0.0, 0.0))).unwrap();
        assert_eq!(report.cells.len(), 6);
        assert!(report.cells.iter().all(|c| c.delta_mu == 0.0 && c.rho == 0.0));
        for d in [4, 6] {
            for e in [1, 2, 3] {
                assert!(report.cell(d, e).is_some());
            }
        }
    }

    #[test]
    fn duplicates_collapse() {
        let mut seen = Vec::new();
        let report = sweep(&slices(), InitStrategy::Incremental, &[4, 4], &[1, 2, 1], &base(), None, |run| {
            seen.push(run.spaces[0].1.dim());
            Ok((1.0, -1.0))
        })
        .unwrap();
        assert_eq!(report.cells.len(), 2);
        assert_eq!(seen, vec![4, 4]);
    }

    #[test]
    fn csv_header() {
        let report = SweepReport {
            strategy: InitStrategy::Internal,
            dims: vec![100],
            epochs: vec![10],
            cells: vec![SweepCell { dim: 100, epochs: 10, delta_mu: 0.5, rho: -0.25 }],
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "strategy,dim,epochs,delta_mu,rho\ninternal,100,10,0.5,-0.25\n");
    }
}
