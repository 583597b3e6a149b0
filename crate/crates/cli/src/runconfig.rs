//! Flat `key = value` run configuration.
//!
//! Files are UTF-8 lines of `key = value` with `#` comments. Unknown keys
//! are rejected before anything runs. Command line flags override file
//! values; the `MAL_SEED` environment variable backfills the seed when
//! neither the flag nor the file sets one.

use mnac_core::{Error, Result, SystemConfig};

/// Parsed configuration: only keys that were actually set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub ell: Option<usize>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub n0: Option<usize>,
    pub nr: Option<usize>,
    pub nt: Option<usize>,
    pub beta: Option<Vec<f64>>,
    pub power: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub rho: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub zscore: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub gamma: Option<f64>,
    pub budget: Option<u64>,
    pub groups: Option<Vec<(usize, f64)>>,
    pub subset_samples: Option<usize>,
    pub kn_frac: Option<f64>,
    pub md_size: Option<usize>,
    pub delta_fracs: Option<Vec<f64>>,
    pub conv_tol: Option<f64>,
    pub n0_grid: Option<Vec<usize>>,
    pub n_grid: Option<Vec<usize>>,
    pub nr_grid: Option<Vec<usize>>,
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::invalid(format!("{key}: expected integer, got `{v}`")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| Error::invalid(format!("{key}: expected integer, got `{v}`")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::invalid(format!("{key}: expected number, got `{v}`")))
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|p| parse_f64(key, p.trim())).collect()
}

/// Integer grid: either a comma list `1,2,4` or a range `a:b:step`
/// (inclusive of `b` when hit exactly or overshot).
pub fn parse_grid(key: &str, v: &str) -> Result<Vec<usize>> {
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!("{key}: range must be a:b:step")));
        }
        let a = parse_usize(key, parts[0].trim())?;
        let b = parse_usize(key, parts[1].trim())?;
        let step = parse_usize(key, parts[2].trim())?;
        if step == 0 || b < a {
            return Err(Error::invalid(format!("{key}: need step > 0 and b >= a")));
        }
        Ok((a..=b).step_by(step).collect())
    } else {
        v.split(',').map(|p| parse_usize(key, p.trim())).collect()
    }
}

fn parse_groups(v: &str) -> Result<Vec<(usize, f64)>> {
    v.split(',')
        .map(|pair| {
            let (c, r) = pair
                .split_once(':')
                .ok_or_else(|| Error::invalid("groups: expected count:log_m pairs"))?;
            Ok((parse_usize("groups", c.trim())?, parse_f64("groups", r.trim())?))
        })
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "ell" => self.ell = Some(parse_usize(key, value)?),
            "k" => self.k = Some(parse_usize(key, value)?),
            "n" => self.n = Some(parse_usize(key, value)?),
            "n0" => self.n0 = Some(parse_usize(key, value)?),
            "nr" => self.nr = Some(parse_usize(key, value)?),
            "nt" => self.nt = Some(parse_usize(key, value)?),
            "beta" => self.beta = Some(parse_f64_list(key, value)?),
            "power" => self.power = Some(parse_f64_list(key, value)?),
            "epsilon" => self.epsilon = Some(parse_f64(key, value)?),
            "rho" => self.rho = Some(parse_f64(key, value)?),
            "trials" => self.trials = Some(parse_usize(key, value)?),
            "seed" => self.seed = Some(parse_u64(key, value)?),
            "workers" => self.workers = Some(parse_usize(key, value)?),
            "zscore" => self.zscore = Some(parse_f64(key, value)?),
            "delta1" => self.delta1 = Some(parse_f64(key, value)?),
            "delta2" => self.delta2 = Some(parse_f64(key, value)?),
            "gamma" => self.gamma = Some(parse_f64(key, value)?),
            "budget" => self.budget = Some(parse_u64(key, value)?),
            "groups" => self.groups = Some(parse_groups(value)?),
            "subset_samples" => self.subset_samples = Some(parse_usize(key, value)?),
            "kn_frac" => self.kn_frac = Some(parse_f64(key, value)?),
            "md_size" => self.md_size = Some(parse_usize(key, value)?),
            "delta_fracs" => self.delta_fracs = Some(parse_f64_list(key, value)?),
            "conv_tol" => self.conv_tol = Some(parse_f64(key, value)?),
            "n0_grid" => self.n0_grid = Some(parse_grid(key, value)?),
            "n_grid" => self.n_grid = Some(parse_grid(key, value)?),
            "nr_grid" => self.nr_grid = Some(parse_grid(key, value)?),
            _ => return Err(Error::invalid(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Canonical text form; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        };
        let fmt_f = |v: f64| format!("{v:?}");
        let fmt_fl = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let fmt_ul = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if let Some(v) = self.ell { put("ell", v.to_string()) }
        if let Some(v) = self.k { put("k", v.to_string()) }
        if let Some(v) = self.n { put("n", v.to_string()) }
        if let Some(v) = self.n0 { put("n0", v.to_string()) }
        if let Some(v) = self.nr { put("nr", v.to_string()) }
        if let Some(v) = self.nt { put("nt", v.to_string()) }
        if let Some(v) = &self.beta { put("beta", fmt_fl(v)) }
        if let Some(v) = &self.power { put("power", fmt_fl(v)) }
        if let Some(v) = self.epsilon { put("epsilon", fmt_f(v)) }
        if let Some(v) = self.rho { put("rho", fmt_f(v)) }
        if let Some(v) = self.trials { put("trials", v.to_string()) }
        if let Some(v) = self.seed { put("seed", v.to_string()) }
        if let Some(v) = self.workers { put("workers", v.to_string()) }
        if let Some(v) = self.zscore { put("zscore", fmt_f(v)) }
        if let Some(v) = self.delta1 { put("delta1", fmt_f(v)) }
        if let Some(v) = self.delta2 { put("delta2", fmt_f(v)) }
        if let Some(v) = self.gamma { put("gamma", fmt_f(v)) }
        if let Some(v) = self.budget { put("budget", v.to_string()) }
        if let Some(v) = &self.groups {
            put(
                "groups",
                v.iter().map(|(c, r)| format!("{c}:{r:?}")).collect::<Vec<_>>().join(","),
            )
        }
        if let Some(v) = self.subset_samples { put("subset_samples", v.to_string()) }
        if let Some(v) = self.kn_frac { put("kn_frac", fmt_f(v)) }
        if let Some(v) = self.md_size { put("md_size", v.to_string()) }
        if let Some(v) = &self.delta_fracs { put("delta_fracs", fmt_fl(v)) }
        if let Some(v) = self.conv_tol { put("conv_tol", fmt_f(v)) }
        if let Some(v) = &self.n0_grid { put("n0_grid", fmt_ul(v)) }
        if let Some(v) = &self.n_grid { put("n_grid", fmt_ul(v)) }
        if let Some(v) = &self.nr_grid { put("nr_grid", fmt_ul(v)) }
        out
    }

    /// Apply defaults and the seed fallback chain (file, then `MAL_SEED`).
    pub fn resolve(&self) -> Result<Resolved> {
        let seed = match self.seed {
            Some(s) => s,
            None => match std::env::var("MAL_SEED") {
                Ok(v) => v
                    .parse()
                    .map_err(|_| Error::invalid(format!("MAL_SEED: expected integer, got `{v}`")))?,
                Err(_) => 0,
            },
        };
        let ell = self.ell.unwrap_or(12);
        let k = self.k.unwrap_or(2);
        let broadcast = |v: &Option<Vec<f64>>, name: &str| -> Result<Vec<f64>> {
            match v {
                None => Ok(vec![1.0; ell]),
                Some(list) if list.len() == 1 => Ok(vec![list[0]; ell]),
                Some(list) if list.len() == ell => Ok(list.clone()),
                Some(list) => Err(Error::invalid(format!(
                    "{name}: expected 1 or {ell} entries, got {}",
                    list.len()
                ))),
            }
        };
        Ok(Resolved {
            ell,
            k,
            n: self.n.unwrap_or(64),
            n0: self.n0.unwrap_or(8),
            nr: self.nr.unwrap_or(2),
            nt: self.nt.unwrap_or(1),
            beta: broadcast(&self.beta, "beta")?,
            power: broadcast(&self.power, "power")?,
            epsilon: self.epsilon.unwrap_or(0.1),
            rho: self.rho.unwrap_or(1.0),
            trials: self.trials.unwrap_or(100_000),
            seed,
            workers: self.workers.unwrap_or(0),
            zscore: self.zscore.unwrap_or(1.96),
            delta1: self.delta1.unwrap_or(0.1),
            delta2: self.delta2.unwrap_or(0.1),
            gamma: self.gamma.unwrap_or(1.0),
            budget: self.budget.unwrap_or(1_000_000),
            groups: self.groups.clone(),
            subset_samples: self.subset_samples.unwrap_or(20),
            kn_frac: self.kn_frac.unwrap_or(0.1),
            md_size: self.md_size.unwrap_or(2),
            delta_fracs: self.delta_fracs.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0]),
            conv_tol: self.conv_tol.unwrap_or(0.01),
            n0_grid: self.n0_grid.clone().unwrap_or_else(|| vec![1, 2, 4, 8]),
            n_grid: self.n_grid.clone().unwrap_or_else(|| vec![20, 63, 200, 632, 2000]),
            nr_grid: self.nr_grid.clone().unwrap_or_else(|| (1..=8).collect()),
        })
    }
}

/// Configuration with every default applied.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub ell: usize,
    pub k: usize,
    pub n: usize,
    pub n0: usize,
    pub nr: usize,
    pub nt: usize,
    pub beta: Vec<f64>,
    pub power: Vec<f64>,
    pub epsilon: f64,
    pub rho: f64,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub zscore: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma: f64,
    pub budget: u64,
    pub groups: Option<Vec<(usize, f64)>>,
    pub subset_samples: usize,
    pub kn_frac: f64,
    pub md_size: usize,
    pub delta_fracs: Vec<f64>,
    pub conv_tol: f64,
    pub n0_grid: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub nr_grid: Vec<usize>,
}

impl Resolved {
    /// Build and validate the scenario part.
    pub fn system_config(&self) -> Result<SystemConfig> {
        let cfg = SystemConfig {
            total_users: self.ell,
            active_avg: self.k,
            block_len: self.n,
            sig_len: self.n0,
            rx_antennas: self.nr,
            tx_antennas: self.nt,
            gain: self.beta.clone(),
            power: self.power.clone(),
            epsilon: self.epsilon,
            rho: self.rho,
            trials: self.trials,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Gain·power product shared by all users, or an error for commands that
    /// need a homogeneous population.
    pub fn homogeneous_gain_power(&self) -> Result<f64> {
        let first = self.beta[0] * self.power[0];
        for i in 1..self.ell {
            if ((self.beta[i] * self.power[i]) - first).abs() > 1e-12 * first.abs().max(1.0) {
                return Err(Error::invalid("this command requires homogeneous beta·power"));
            }
        }
        Ok(first)
    }
}
