//! The five analysis commands. Each returns the full CSV text; the caller
//! decides where it goes. Output is deterministic for a fixed config and
//! seed at any worker count.

use mnac_core::limits::{
    identification_cost_achievable, identification_cost_converse, limit_report, mi_by_size,
};
use mnac_core::numerics::binary_entropy;
use mnac_core::sic::{dt_exponent, n_times_c, sequence_verdict, SicReport};
use mnac_core::{detect, info, Error, RateAllocation, Result, RngStream, UserSet};

use crate::runconfig::Resolved;

// Fixed operation tags so every command draws from its own stream family.
const TAG_MI_FULL: u64 = 1;
const TAG_MI_SIZE: u64 = 2;
const TAG_DETECT: u64 = 3;
const TAG_CONC_CONST: u64 = 4;
const TAG_CONC_SAMPLES: u64 = 5;
const TAG_FIG_A: u64 = 6;
const TAG_FIG_B: u64 = 7;

/// 12 significant digits, scientific notation; bit-exact across runs.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.11e}")
}

fn base_stream(r: &Resolved) -> RngStream {
    RngStream::root(r.seed)
}

fn mi_full(r: &Resolved) -> Result<mnac_core::McEstimate> {
    let cfg = r.system_config()?;
    info::mutual_information(
        &cfg,
        &UserSet::first_n(r.k),
        r.trials,
        base_stream(r).substream(TAG_MI_FULL),
    )
}

/// Per-size worst-case mutual information for sizes 1..=k.
fn mi_sizes(r: &Resolved) -> Result<Vec<f64>> {
    let cfg = r.system_config()?;
    let stream = base_stream(r).substream(TAG_MI_SIZE);
    (1..=r.k)
        .map(|i| {
            Ok(mi_by_size(&cfg, i, r.trials, stream.substream(i as u64), r.subset_samples)?.mean)
        })
        .collect()
}

/// Expand the group allocation into one log-codebook-size entry per active
/// user; equal sizes when no groups are configured.
fn allocation(r: &Resolved) -> Result<(RateAllocation, Vec<(usize, usize)>)> {
    // returns (allocation, group table as (count, first user offset))
    match &r.groups {
        None => Ok((RateAllocation::equal(r.k, r.n)?, vec![(r.k, 0)])),
        Some(groups) => {
            let total: usize = groups.iter().map(|(c, _)| *c).sum();
            if total != r.k {
                return Err(Error::invalid(format!(
                    "groups cover {total} users but k = {}",
                    r.k
                )));
            }
            let mut log_m = Vec::with_capacity(r.k);
            let mut table = Vec::new();
            for (count, lm) in groups {
                table.push((*count, log_m.len()));
                log_m.extend(std::iter::repeat_n(*lm, *count));
            }
            Ok((RateAllocation::new(log_m, r.n)?, table))
        }
    }
}

/// Thresholds, rates, and capacities for one scenario.
pub fn cmd_limits(r: &Resolved) -> Result<String> {
    let cfg = r.system_config()?;
    let sizes = mi_sizes(r)?;
    let full = mi_full(r)?;
    let (alloc, table) = allocation(r)?;
    let rep = limit_report(&cfg, &alloc, |i| sizes[i - 1], full.mean)?;

    let ln2 = std::f64::consts::LN_2;
    let mut out = String::new();
    out.push_str(&format!("n0_ach,{}\n", fmt_real(rep.n0_achievable)));
    out.push_str(&format!("n0_conv,{}\n", fmt_real(rep.n0_converse)));
    out.push_str(&format!("n0_asym,{}\n", fmt_real(rep.n0_asymptotic)));
    out.push_str(&format!("argmax_i,{}\n", rep.argmax_size));
    out.push_str(&format!("theta,{}\n", fmt_real(rep.theta)));
    out.push_str(&format!("sum_rhs_nats,{}\n", fmt_real(rep.sum_rhs)));
    out.push_str(&format!("infeasible,{}\n", rep.infeasible));
    out.push_str("user_group,c_k,mu_k,R_k_nats,B_k_nats,R_k_bits,B_k_bits\n");
    for (g, (_, offset)) in table.iter().enumerate() {
        let i = *offset;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            g + 1,
            fmt_real(alloc.uses()[i]),
            fmt_real(alloc.share()[i]),
            fmt_real(rep.rates[i]),
            fmt_real(rep.capacities[i]),
            fmt_real(rep.rates[i] / ln2),
            fmt_real(rep.capacities[i] / ln2),
        ));
    }
    Ok(out)
}

/// Sum-capacity and θ sweeps over block length (two population scalings)
/// and over the receive antenna count.
pub fn cmd_figures(r: &Resolved) -> Result<String> {
    if r.n_grid.is_empty() || r.nr_grid.is_empty() {
        return Err(Error::invalid("figures needs nonempty n and NR grids"));
    }
    if !(r.kn_frac > 0.0 && r.kn_frac <= 1.0) {
        return Err(Error::invalid("kn_frac must lie in (0, 1]"));
    }
    let gp = r.homogeneous_gain_power()?;
    let mut out = String::new();
    out.push_str("n,ell_mode,k,NR,sum_capacity_nats,theta\n");

    let emit = |out: &mut String, n: usize, k: usize, nr: usize, mi: f64| -> Result<()> {
        for (mode, ell) in [("n", n), ("n2", n * n)] {
            let alpha = k as f64 / ell as f64;
            let uncertainty = ell as f64 * binary_entropy(alpha)?;
            let sum_cap = n as f64 * mi - uncertainty;
            let th = uncertainty / (n as f64 * mi);
            out.push_str(&format!(
                "{n},{mode},{k},{nr},{},{}\n",
                fmt_real(sum_cap),
                fmt_real(th)
            ));
        }
        Ok(())
    };

    // sweep over the block length at the configured antenna count
    let stream_a = base_stream(r).substream(TAG_FIG_A);
    for (gi, &n) in r.n_grid.iter().enumerate() {
        let k = ((r.kn_frac * n as f64).round() as usize).max(1);
        let mi = info::mutual_information_products(
            &vec![gp; k],
            r.nr,
            r.nt,
            r.trials,
            stream_a.substream(gi as u64),
        )?;
        emit(&mut out, n, k, r.nr, mi.mean)?;
    }

    // sweep over the antenna count at the configured block length
    let stream_b = base_stream(r).substream(TAG_FIG_B);
    let k = ((r.kn_frac * r.n as f64).round() as usize).max(1);
    for (gi, &nr) in r.nr_grid.iter().enumerate() {
        let mi = info::mutual_information_products(
            &vec![gp; k],
            nr,
            r.nt,
            r.trials,
            stream_b.substream(gi as u64),
        )?;
        emit(&mut out, r.n, k, nr, mi.mean)?;
    }
    Ok(out)
}

/// Empirical ML detection error across a signature-length grid, against the
/// achievable/converse thresholds.
pub fn cmd_detect(r: &Resolved) -> Result<String> {
    let cfg = r.system_config()?;
    let sizes = mi_sizes(r)?;
    let (thr_ach, _) = identification_cost_achievable(&cfg, |i| sizes[i - 1])?;
    let (thr_conv, _) = identification_cost_converse(&cfg, |i| sizes[i - 1])?;
    let rows = detect::error_sweep(
        &cfg,
        &r.n0_grid,
        r.trials,
        base_stream(r).substream(TAG_DETECT),
        r.budget,
    )?;
    let mut out = String::new();
    out.push_str("n0,trials,errors,pe,ci_low,ci_high,threshold_ach,threshold_conv\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.sig_len,
            row.trials,
            row.errors,
            fmt_real(row.p_e),
            fmt_real(row.ci_low),
            fmt_real(row.ci_high),
            fmt_real(thr_ach),
            fmt_real(thr_conv),
        ));
    }
    Ok(out)
}

/// Empirical tail of the block information density against the Bernstein
/// bound, on a grid of deviations proportional to the per-use mean.
pub fn cmd_concentration(r: &Resolved) -> Result<String> {
    let cfg = r.system_config()?;
    if r.md_size < 1 || r.md_size > r.k {
        return Err(Error::invalid("md_size must lie in 1..=k"));
    }
    if r.delta_fracs.is_empty() {
        return Err(Error::invalid("delta_fracs must be nonempty"));
    }
    let md = UserSet::first_n(r.md_size);
    let scenario = mnac_core::ActivityScenario::new(md.clone(), UserSet::empty());
    let conc = info::concentration_constant(
        &cfg,
        &md,
        r.trials,
        base_stream(r).substream(TAG_CONC_CONST),
    )?;
    let mi = conc.mi; // per-use mean from the same draws
    let uses = r.n0;
    let densities = mnac_core::mc::par_map_trials(
        r.trials,
        mnac_core::mc::DEFAULT_CHUNK,
        base_stream(r).substream(TAG_CONC_SAMPLES),
        |rng| info::sample_information_density(&cfg, &scenario, uses, rng).expect("valid scenario"),
    );
    let mut out = String::new();
    out.push_str("delta,empirical_tail,tail_ci_high,bernstein_bound,dominated\n");
    for &frac in &r.delta_fracs {
        if frac < 0.0 {
            return Err(Error::invalid("delta_fracs must be nonnegative"));
        }
        let delta = frac * mi.mean;
        let gate = uses as f64 * delta;
        let hits = densities
            .iter()
            .filter(|&&d| (d - uses as f64 * mi.mean).abs() >= gate)
            .count();
        let (p, _, hi) = mnac_core::mc::binomial_ci(hits, densities.len(), r.zscore);
        let bound = info::bernstein_tail_bound(uses, delta, conc.upper)?;
        let se = (p * (1.0 - p) / densities.len() as f64).sqrt();
        let dominated = p <= bound + 3.0 * se;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_real(delta),
            fmt_real(p),
            fmt_real(hi),
            fmt_real(bound),
            dominated,
        ));
    }
    Ok(out)
}

/// Block-scaled successive-decoding capacity and DT exponent across block
/// lengths, for fixed and linearly growing antenna counts.
pub fn cmd_sic(r: &Resolved) -> Result<String> {
    if r.n_grid.len() < 2 {
        return Err(Error::invalid("sic needs a block-length grid with >= 2 points"));
    }
    if r.n_grid.iter().any(|&n| n < 2) {
        return Err(Error::invalid("sic grid block lengths must be >= 2"));
    }
    let gp = r.homogeneous_gain_power()?;
    let mut out = String::new();
    out.push_str("n,NR_mode,nC,dt_exponent,verdict\n");
    for (mode, rx_of) in
        [("fixed", Box::new(|_: usize| r.nr) as Box<dyn Fn(usize) -> usize>), ("linear", Box::new(|n: usize| n))]
    {
        let seq: Vec<f64> = r.n_grid.iter().map(|&n| n_times_c(n, rx_of(n), gp)).collect();
        let verdict = sequence_verdict(&seq, r.conv_tol);
        for (i, &n) in r.n_grid.iter().enumerate() {
            let report = SicReport {
                c_first: seq[i] / n as f64,
                n_times_c: seq[i],
                dt_exponent: dt_exponent(n, rx_of(n), n, gp, r.epsilon)?,
                verdict,
            };
            out.push_str(&format!(
                "{n},{mode},{},{},{}\n",
                fmt_real(report.n_times_c),
                fmt_real(report.dt_exponent),
                report.verdict,
            ));
        }
    }
    Ok(out)
}
