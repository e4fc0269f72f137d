use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use clap::Args;
use radiomap_core::entropy::{delta_h_map_mean, entropy_profile, load_trace, write_profile_csv, EntropyUnit, LogitTrace};
use radiomap_core::envmap::encode_grid;
use radiomap_core::ordering::load_order;

use crate::scene::write_atomic;
use crate::{Context, Status};

#[derive(Args, Debug)]
pub struct EntropyArgs {
    /// LTR1 trace; pair each with one `--order`.
    #[arg(long = "trace", required = true)]
    pub traces: Vec<PathBuf>,
    /// Order file matching the `--trace` at the same position.
    #[arg(long = "order", required = true)]
    pub orders: Vec<PathBuf>,
    /// Comparison traces for ΔH = H(trace) - H(against).
    #[arg(long = "against-trace")]
    pub against_traces: Vec<PathBuf>,
    #[arg(long = "against-order")]
    pub against_orders: Vec<PathBuf>,
    /// Step-wise `step,mean,std` CSV.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    /// Per-patch ΔH map as RGF1.
    #[arg(long)]
    pub delta_out: Option<PathBuf>,
    /// Report bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

fn load_group(traces: &[PathBuf], orders: &[PathBuf], flag: &str) -> Result<Vec<LogitTrace>> {
    if traces.len() != orders.len() {
        bail!("{} {flag}trace files but {} {flag}order files", traces.len(), orders.len());
    }
    traces
        .iter()
        .zip(orders)
        .map(|(t, o)| {
            let raw = load_trace(t).with_context(|| format!("loading {}", t.display()))?;
            let order = load_order(o).with_context(|| format!("loading {}", o.display()))?.order()?;
            LogitTrace::new(raw, order).with_context(|| format!("pairing {} with {}", t.display(), o.display()))
        })
        .collect()
}

pub fn run(ctx: &Context, args: EntropyArgs) -> Result<Status> {
    let bits = args.bits || ctx.cfg.get::<bool>("bits")?.unwrap_or(false);
    let unit = if bits { EntropyUnit::Bits } else { EntropyUnit::Nats };
    let label = if bits { "bits" } else { "nats" };
    let group_a = load_group(&args.traces, &args.orders, "--")?;

    let mut profile = entropy_profile(&group_a)?;
    profile.mean.iter_mut().chain(profile.std.iter_mut()).for_each(|h| *h = unit.from_nats(*h));
    profile.overall = unit.from_nats(profile.overall);
    println!("traces = {}\nsteps = {}\nmean_entropy_{label} = {}", group_a.len(), profile.mean.len(), profile.overall);
    if let Some(path) = &args.profile_out {
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &profile)?;
        write_atomic(path, buf)?;
    }

    if args.against_traces.is_empty() {
        if args.delta_out.is_some() {
            bail!("--delta-out needs --against-trace/--against-order pairs");
        }
        return Ok(Status::Ok);
    }
    let group_b = load_group(&args.against_traces, &args.against_orders, "--against-")?;
    if group_a.len() != group_b.len() {
        bail!("{} traces against {} comparison traces", group_a.len(), group_b.len());
    }
    let pairs: Vec<_> = group_a.iter().zip(&group_b).collect();
    let mut delta = delta_h_map_mean(&pairs)?;
    delta.values.iter_mut().for_each(|v| *v = unit.from_nats(*v));
    delta.mean = unit.from_nats(delta.mean);
    delta.variance = unit.from_nats(unit.from_nats(delta.variance));
    println!("delta_mean_{label} = {}\ndelta_variance = {}", delta.mean, delta.variance);
    if let Some(path) = &args.delta_out {
        write_atomic(path, encode_grid(&delta.to_field()?)?)?;
    }
    Ok(Status::Ok)
}
