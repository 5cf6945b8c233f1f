use crate::error::{Error, Result};
use crate::wavelet::{Band, DecompositionSet};

use super::stats::{pearson, rms};
use super::{Window, WEAK_PARTICIPATION_RATIO};

/// Fewest window samples accepted for a correlation estimate.
pub const MIN_COHERENCY_SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentGroup {
    /// Channel indices, ascending.
    pub members: Vec<usize>,
    /// Member with the largest band RMS.
    pub reference: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupMembership {
    Group(usize),
    Weak,
}

/// Partition of channels by the sign and strength of their deepest-detail
/// oscillation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherencyPartition {
    pub window: Window,
    pub band: Band,
    pub labels: Vec<String>,
    /// Ordered by smallest member.
    pub groups: Vec<CoherentGroup>,
    /// Weakly participating channels, ascending.
    pub weak: Vec<usize>,
    /// Group index pairs (i < j) whose mean cross-correlation is at most
    /// -theta_out.
    pub opposing: Vec<(usize, usize)>,
    /// Pairwise correlation; `None` where a channel has zero variance.
    pub correlation: Vec<Vec<Option<f64>>>,
    pub rms: Vec<f64>,
}

impl CoherencyPartition {
    pub fn membership(&self, channel: usize) -> GroupMembership {
        self.groups
            .iter()
            .position(|g| g.members.contains(&channel))
            .map_or(GroupMembership::Weak, GroupMembership::Group)
    }

    pub fn are_opposing(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.opposing.contains(&key)
    }

    /// Groups as sorted label sets, for comparisons independent of channel
    /// order.
    pub fn label_groups(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .groups
            .iter()
            .map(|g| {
                let mut v: Vec<String> = g.members.iter().map(|&i| self.labels[i].clone()).collect();
                v.sort();
                v
            })
            .collect();
        out.sort();
        out
    }

    /// `coherency.csv`: `channel,group,rms_d5`; group is 1-based or `weak`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("channel,group,rms_{}\n", self.band.to_string().to_lowercase());
        for (i, label) in self.labels.iter().enumerate() {
            let group = match self.membership(i) {
                GroupMembership::Group(g) => (g + 1).to_string(),
                GroupMembership::Weak => "weak".to_string(),
            };
            out.push_str(&format!("{label},{group},{:.15e}\n", self.rms[i]));
        }
        out
    }
}

/// Group channels by zero-lag correlation of their deepest detail
/// component (D5 at the default depth) over `window`.
///
/// Channels with band RMS below 0.25 of the largest, or with zero
/// variance, are set aside as weakly participating. The rest are merged by
/// complete linkage while every cross pair correlates at `theta_in` or
/// more. Group pairs whose mean cross-correlation is at most `-theta_out`
/// are marked opposing.
pub fn coherency_groups(
    decomp: &DecompositionSet,
    window: Window,
    theta_in: f64,
    theta_out: f64,
) -> Result<CoherencyPartition> {
    if !(theta_out > 0.0 && theta_out <= theta_in && theta_in <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < theta_out <= theta_in <= 1, got theta_in = {theta_in}, theta_out = {theta_out}"
        )));
    }
    let band = Band::Detail(decomp.levels());
    let labels: Vec<String> = decomp.labels().iter().map(|s| s.to_string()).collect();
    let n = decomp.num_channels();
    if n == 0 {
        return Ok(CoherencyPartition {
            window,
            band,
            labels,
            groups: Vec::new(),
            weak: Vec::new(),
            opposing: Vec::new(),
            correlation: Vec::new(),
            rms: Vec::new(),
        });
    }
    let range = decomp.window_indices(window.start, window.end)?;
    if range.len() < MIN_COHERENCY_SAMPLES {
        return Err(Error::InvalidWindow {
            t0: window.start,
            t1: window.end,
            reason: format!(
                "window too short: {} samples, need at least {MIN_COHERENCY_SAMPLES}",
                range.len()
            ),
        });
    }
    let series: Vec<&[f64]> = (0..n)
        .map(|c| &decomp.component(c, band).expect("deepest detail exists")[range.clone()])
        .collect();
    let amplitudes: Vec<f64> = series.iter().map(|s| rms(s)).collect();
    let correlation: Vec<Vec<Option<f64>>> = (0..n)
        .map(|i| (0..n).map(|j| pearson(series[i], series[j])).collect())
        .collect();

    let max_rms = amplitudes.iter().cloned().fold(0.0, f64::max);
    let is_weak = |i: usize| amplitudes[i] < WEAK_PARTICIPATION_RATIO * max_rms || correlation[i][i].is_none();
    let weak: Vec<usize> = (0..n).filter(|&i| is_weak(i)).collect();
    let mut clusters: Vec<Vec<usize>> = (0..n).filter(|&i| !is_weak(i)).map(|i| vec![i]).collect();

    let corr = |i: usize, j: usize| correlation[i][j].expect("strong channels have variance");
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let link = clusters[a]
                    .iter()
                    .flat_map(|&i| clusters[b].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| corr(i, j))
                    .fold(f64::INFINITY, f64::min);
                if link >= theta_in && best.is_none_or(|(l, _, _)| link > l) {
                    best = Some((link, a, b));
                }
            }
        }
        match best {
            Some((_, a, b)) => {
                let merged = clusters.remove(b);
                clusters[a].extend(merged);
                clusters[a].sort_unstable();
            }
            None => break,
        }
    }
    clusters.sort_by_key(|c| c[0]);

    let groups: Vec<CoherentGroup> = clusters
        .into_iter()
        .map(|members| {
            let reference = *members
                .iter()
                .max_by(|&&a, &&b| amplitudes[a].total_cmp(&amplitudes[b]).then(b.cmp(&a)))
                .expect("groups are non-empty");
            CoherentGroup { members, reference }
        })
        .collect();

    let mut opposing = Vec::new();
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            let pairs: Vec<f64> = groups[a]
                .members
                .iter()
                .flat_map(|&i| groups[b].members.iter().map(move |&j| (i, j)))
                .map(|(i, j)| corr(i, j))
                .collect();
            let mean = pairs.iter().sum::<f64>() / pairs.len() as f64;
            if mean <= -theta_out {
                opposing.push((a, b));
            }
        }
    }

    Ok(CoherencyPartition {
        window,
        band,
        labels,
        groups,
        weak,
        opposing,
        correlation,
        rms: amplitudes,
    })
}
