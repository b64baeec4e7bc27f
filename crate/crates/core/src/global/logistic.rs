use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, auc_rank};
use super::table::{Standardizer, SummaryTable};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    /// Strength of the `l2 / 2 * |w|^2` penalty added to the mean log-loss.
    /// The intercept is not penalized.
    pub l2: f64,
    pub train_fraction: f64,
    pub folds: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1.0,
            train_fraction: 0.7,
            folds: 5,
            max_iter: 100,
            tol: 1e-10,
        }
    }
}

/// Affine model in raw feature space: `logit(x) = intercept + w . x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn logit(&self, row: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }
}

/// Logistic regression fitted on standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub standardizer: Standardizer,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticModel {
    pub fn logit(&self, row: &[f64]) -> f64 {
        let z = self.standardizer.transform_row(row);
        self.intercept + self.weights.iter().zip(&z).map(|(w, x)| w * x).sum::<f64>()
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.logit(row))
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.logit(row) > 0.0)
    }

    /// The same decision function expressed on raw features.
    pub fn raw_model(&self) -> LinearModel {
        let weights: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.standardizer.stds)
            .map(|(w, s)| w / s)
            .collect();
        let shift: f64 = weights.iter().zip(&self.standardizer.means).map(|(w, m)| w * m).sum();
        LinearModel {
            weights,
            intercept: self.intercept - shift,
        }
    }
}

/// Penalized maximum likelihood by damped Newton iterations.
pub fn train_logistic(
    rows: &[Vec<f64>],
    labels: &[u8],
    names: &[String],
    config: &LogisticConfig,
) -> Result<LogisticModel> {
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(Error::Size(format!("{} rows, {} labels", rows.len(), labels.len())));
    }
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::Stratification("training data contains a single class".into()));
    }
    let standardizer = Standardizer::fit(rows, names)?;
    let z = standardizer.transform(rows);
    let (n, p) = (rows.len(), names.len());
    let nf = n as f64;
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    // column 0 is the intercept
    let x = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { z[i][j - 1] });
    let objective = |theta: &DVector<f64>| -> f64 {
        let eta = &x * theta;
        let loss: f64 = eta.iter().zip(&y).map(|(e, yi)| softplus(*e) - yi * e).sum::<f64>() / nf;
        let pen: f64 = theta.iter().skip(1).map(|w| w * w).sum::<f64>();
        loss + 0.5 * config.l2 * pen
    };

    let mut theta = DVector::zeros(p + 1);
    let mut f = objective(&theta);
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..config.max_iter {
        iterations = it + 1;
        let eta = &x * &theta;
        let mu: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let resid = DVector::from_iterator(n, mu.iter().zip(&y).map(|(m, yi)| m - yi));
        let mut grad = x.transpose() * resid / nf;
        for j in 1..=p {
            grad[j] += config.l2 * theta[j];
        }
        if grad.amax() < config.tol {
            converged = true;
            break;
        }
        let wts = DVector::from_iterator(n, mu.iter().map(|m| m * (1.0 - m)));
        let mut hess = x.transpose() * DMatrix::from_diagonal(&wts) * &x / nf;
        for j in 1..=p {
            hess[(j, j)] += config.l2;
        }
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => {
                for j in 0..=p {
                    hess[(j, j)] += 1e-8;
                }
                hess.cholesky()
                    .map(|ch| ch.solve(&grad))
                    .unwrap_or_else(|| grad.clone())
            }
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let cand = &theta - &step * t;
            let fc = objective(&cand);
            if fc <= f - 1e-4 * t * grad.dot(&step) || fc < f {
                theta = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            converged = grad.amax() < config.tol.sqrt();
            break;
        }
    }
    Ok(LogisticModel {
        standardizer,
        intercept: theta[0],
        weights: theta.iter().skip(1).copied().collect(),
        iterations,
        converged,
    })
}

/// Stratified split: each class contributes `round(train_fraction * n_c)`
/// rows to training. Both index lists are ascending.
pub fn stratified_split(labels: &[u8], train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Domain(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        let n_train = (train_fraction * idx.len() as f64).round() as usize;
        if n_train == 0 || n_train == idx.len() {
            return Err(Error::Stratification(format!(
                "class {class} with {} rows cannot appear in both splits",
                idx.len()
            )));
        }
        idx.shuffle(&mut seed::rng(seed, &[0x5b, class as u64]));
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Fold id per position of `labels`, dealt round-robin within each class.
pub fn stratified_folds(labels: &[u8], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidInput(format!("need >= 2 folds, got {folds}")));
    }
    let mut assignment = vec![0; labels.len()];
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut seed::rng(seed, &[0xf0, class as u64]));
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub feature_names: Vec<String>,
    pub config: LogisticConfig,
    pub seed: u64,
    pub model: LogisticModel,
    pub raw_model: LinearModel,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub test_auc: f64,
    pub cv_scores: Vec<f64>,
}

/// Stratified train/test split, fit, test metrics, and stratified k-fold CV
/// accuracies over the training rows.
pub fn fit_logistic(table: &SummaryTable, config: &LogisticConfig, seed: u64) -> Result<RegressionReport> {
    table.require_fit_ready()?;
    let (train, test) = stratified_split(&table.labels, config.train_fraction, seed)?;
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            idx.iter().map(|&i| table.rows[i].clone()).collect(),
            idx.iter().map(|&i| table.labels[i]).collect(),
        )
    };
    let (x_train, y_train) = pick(&train);
    let (x_test, y_test) = pick(&test);
    let model = train_logistic(&x_train, &y_train, &table.feature_names, config)?;

    let predict_all = |rows: &[Vec<f64>]| -> Vec<u8> { rows.iter().map(|r| model.predict(r)).collect() };
    let test_scores: Vec<f64> = x_test.iter().map(|r| model.logit(r)).collect();
    let test_auc =
        auc_rank(&test_scores, &y_test).ok_or_else(|| Error::Stratification("test split has a single class".into()))?;

    let folds = stratified_folds(&y_train, config.folds, seed)?;
    let mut cv_scores = Vec::with_capacity(config.folds);
    for f in 0..config.folds {
        let (fit_idx, val_idx): (Vec<usize>, Vec<usize>) = (0..y_train.len()).partition(|&i| folds[i] != f);
        let fx: Vec<Vec<f64>> = fit_idx.iter().map(|&i| x_train[i].clone()).collect();
        let fy: Vec<u8> = fit_idx.iter().map(|&i| y_train[i]).collect();
        let m = train_logistic(&fx, &fy, &table.feature_names, config)?;
        let vy: Vec<u8> = val_idx.iter().map(|&i| y_train[i]).collect();
        let vp: Vec<u8> = val_idx.iter().map(|&i| m.predict(&x_train[i])).collect();
        cv_scores.push(accuracy(&vp, &vy));
    }

    Ok(RegressionReport {
        feature_names: table.feature_names.clone(),
        config: *config,
        seed,
        raw_model: model.raw_model(),
        train_accuracy: accuracy(&predict_all(&x_train), &y_train),
        test_accuracy: accuracy(&predict_all(&x_test), &y_test),
        test_auc,
        cv_scores,
        train_indices: train,
        test_indices: test,
        model,
    })
}
