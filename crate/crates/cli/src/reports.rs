use serde::{Deserialize, Serialize};

use macjam::equilibrium::SaddleReport;
use macjam::montecarlo::OracleCheck;
use macjam::report::{fmt_g17, CsvTable};
use macjam::PureStrategyProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub a: f64,
    pub b: Vec<f64>,
    pub sigma2: f64,
    pub c: f64,
    /// Absent when the jammer has no channel to the fusion center.
    pub window: Option<[f64; 2]>,
    pub threshold_bound: f64,
}

fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |j| format!("{prefix}{j}"))
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

impl CsvTable for AggregateReport {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["a".to_string()];
        h.extend(indexed("b", self.b.len()));
        h.extend(
            [
                "sigma2",
                "c",
                "window_low",
                "window_high",
                "threshold_bound",
            ]
            .map(String::from),
        );
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut row = vec![fmt_g17(self.a)];
        row.extend(self.b.iter().map(|x| fmt_g17(*x)));
        row.extend([
            fmt_g17(self.sigma2),
            fmt_g17(self.c),
            opt(self.window.map(|w| w[0])),
            opt(self.window.map(|w| w[1])),
            fmt_g17(self.threshold_bound),
        ]);
        vec![row]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub epsilon: Vec<f64>,
    pub profile: PureStrategyProfile,
    /// Error probability evaluated at the profile.
    pub error_probability: f64,
    /// Closed-form equilibrium error.
    pub equilibrium_error: f64,
    pub in_family: bool,
}

impl CsvTable for EquilibriumReport {
    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = indexed("epsilon", self.epsilon.len()).collect();
        h.push("lambda".into());
        h.extend(indexed("w", self.profile.w.len()));
        h.extend(["pe", "equilibrium_error", "in_family"].map(String::from));
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut row: Vec<String> = self.epsilon.iter().map(|x| fmt_g17(*x)).collect();
        row.push(fmt_g17(self.profile.threshold));
        row.extend(self.profile.w.iter().map(|x| fmt_g17(*x)));
        row.extend([
            fmt_g17(self.error_probability),
            fmt_g17(self.equilibrium_error),
            self.in_family.to_string(),
        ]);
        vec![row]
    }
}

/// Saddle report with a one-row CSV layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SaddleSummary(pub SaddleReport);

impl CsvTable for SaddleSummary {
    fn header(&self) -> Vec<String> {
        let dim = self.0.profile.w.len();
        let mut h = vec!["lambda".to_string()];
        h.extend(indexed("w", dim));
        h.extend(
            [
                "equilibrium_error",
                "fc_side_max_violation",
                "fc_witness_lambda",
                "jammer_side_max_violation",
            ]
            .map(String::from),
        );
        h.extend(indexed("jammer_witness_w", dim));
        h.extend(["holds_fc_side", "holds_jammer_side", "samples", "seed"].map(String::from));
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let r = &self.0;
        let mut row = vec![fmt_g17(r.profile.threshold)];
        row.extend(r.profile.w.iter().map(|x| fmt_g17(*x)));
        row.extend(
            [
                r.equilibrium_error,
                r.fc_side_max_violation,
                r.fc_witness_threshold,
                r.jammer_side_max_violation,
            ]
            .map(fmt_g17),
        );
        row.extend(r.jammer_witness.iter().map(|x| fmt_g17(*x)));
        row.extend([
            r.holds_fc_side.to_string(),
            r.holds_jammer_side.to_string(),
            r.samples.to_string(),
            r.seed.to_string(),
        ]);
        vec![row]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub mode: String,
    pub threshold: f64,
    #[serde(flatten)]
    pub check: OracleCheck,
}

impl CsvTable for McReport {
    fn header(&self) -> Vec<String> {
        [
            "mode",
            "lambda",
            "estimate",
            "trials",
            "stderr",
            "seed",
            "closed_form",
            "deviation",
            "bound",
            "pass",
        ]
        .map(String::from)
        .to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let c = &self.check;
        vec![vec![
            self.mode.clone(),
            fmt_g17(self.threshold),
            fmt_g17(c.estimate.estimate),
            c.estimate.trials.to_string(),
            fmt_g17(c.estimate.stderr),
            c.estimate.seed.to_string(),
            fmt_g17(c.closed_form),
            fmt_g17(c.deviation),
            fmt_g17(c.bound),
            c.pass.to_string(),
        ]]
    }
}
