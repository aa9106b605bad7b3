//! Two-sample Welch t-test and Pearson correlation with Student-t p-values.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n - 1 denominator).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: f64) -> Result<f64> {
    if t.is_infinite() {
        return Ok(0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Stats(format!("t distribution with df={df}: {e}")))?;
    Ok((2.0 * dist.cdf(-t.abs())).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelchTest {
    /// Positive when the first sample has the larger mean.
    pub t: f64,
    pub df: f64,
    pub p: f64,
    /// Both samples have zero variance; `t` is infinite (or zero when the
    /// means coincide) and `p` is 0 (or 1).
    pub degenerate: bool,
}

/// Welch's unequal-variance t-test of `a` against `b`.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Stats("Welch t-test needs at least 2 values per group".into()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (sa, sb) = (variance(a) / a.len() as f64, variance(b) / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let diff = ma - mb;
        return Ok(WelchTest {
            t: if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY },
            df: (a.len() + b.len() - 2) as f64,
            p: if diff == 0.0 { 1.0 } else { 0.0 },
            degenerate: true,
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    Ok(WelchTest {
        t,
        df,
        p: t_two_sided_p(t, df)?,
        degenerate: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pearson {
    pub r: f64,
    /// Two-sided, from `t = r sqrt((n-2)/(1-r^2))` with `n - 2` degrees of freedom.
    pub p: f64,
    pub n: usize,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<Pearson> {
    if x.len() != y.len() {
        return Err(Error::Stats("pearson: length mismatch".into()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Stats("pearson: need at least 3 pairs".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Stats("pearson: first variable is constant".into()));
    }
    if syy == 0.0 {
        return Err(Error::Stats("pearson: second variable is constant".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if r.abs() == 1.0 {
        0.0
    } else {
        t_two_sided_p(r * (df / (1.0 - r * r)).sqrt(), df)?
    };
    Ok(Pearson { r, p, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_reference() {
        // scipy.stats.ttest_ind(a, b, equal_var=False)
        let a = [0.91, 0.85, 0.88, 0.95, 0.79, 0.9];
        let b = [0.7, 0.82, 0.64, 0.75];
        let w = welch_t_test(&a, &b).unwrap();
        assert!((w.t - 3.4420637725385093).abs() < 1e-10, "{}", w.t);
        assert!((w.df - 5.08162510736922).abs() < 1e-10, "{}", w.df);
        assert!((w.p - 0.01792549646337487).abs() < 1e-10, "{}", w.p);
    }

    #[test]
    fn degenerate_groups() {
        let w = welch_t_test(&[0.9, 0.9], &[0.7, 0.7]).unwrap();
        assert!(w.degenerate && w.t == f64::INFINITY && w.p == 0.0);
        let same = welch_t_test(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert!(same.degenerate && same.t == 0.0 && same.p == 1.0);
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pearson_reference() {
        // scipy.stats.pearsonr
        let x = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        let y = [0.9, 0.85, 0.6, 0.8, 0.7, 0.95, 0.75];
        let p = pearson(&x, &y).unwrap();
        assert!((p.r - -0.8097763301789161).abs() < 1e-12, "{}", p.r);
        assert!((p.p - 0.02728097079379898).abs() < 1e-10, "{}", p.p);
    }

    #[test]
    fn pearson_constant() {
        assert!(pearson(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[0.0, 1.0, 0.0], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn perfect_correlation() {
        let p = pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 6.0, 8.0]).unwrap();
        assert!((p.r - 1.0).abs() < 1e-12 && p.p < 1e-12, "{p:?}");
    }
}
