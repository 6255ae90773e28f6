use std::io::Write;

use serde::Serialize;

use super::{RunRow, SlotResult};
use crate::Result;

/// Six significant digits, plain notation for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt6(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

pub fn write_slots_csv<W: Write>(w: W, results: &[SlotResult]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "slot",
        "scheme",
        "seed",
        "psi_star",
        "rtp",
        "mean_delay_s",
        "mean_energy_j",
        "weighted_cost",
        "secure_users",
        "scheduled_tasks",
        "unserved_tasks",
        "infeasible",
    ])?;
    for r in results {
        out.write_record([
            r.slot.to_string(),
            r.scheme.to_string(),
            r.seed.to_string(),
            sig6(r.psi_star),
            sig6(r.rtp),
            sig6(r.mean_delay_s),
            sig6(r.mean_energy_j),
            sig6(r.weighted_cost),
            r.secure_users.to_string(),
            r.scheduled_tasks.to_string(),
            r.unserved_tasks.to_string(),
            r.infeasible.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_tasks_csv<W: Write>(w: W, results: &[SlotResult]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "scheme",
        "seed",
        "slot",
        "user",
        "status",
        "assoc",
        "executor",
        "secure",
        "secrecy_rate_bps",
        "size_bits",
        "cycles",
        "d_trans_s",
        "d_comp_s",
        "d_queue_s",
        "e_trans_j",
        "e_comp_j",
        "total_delay_s",
        "total_energy_j",
        "weighted_cost",
    ])?;
    for r in results {
        for t in &r.tasks {
            let status = serde_json::to_value(t.status)?;
            out.write_record([
                r.scheme.to_string(),
                r.seed.to_string(),
                t.slot.to_string(),
                t.user.to_string(),
                status.as_str().unwrap_or_default().to_string(),
                opt(t.assoc),
                opt(t.executor),
                t.secure.to_string(),
                sig6(t.secrecy_rate_bps),
                sig6(t.size_bits),
                sig6(t.cycles),
                opt6(t.d_trans),
                opt6(t.d_comp),
                opt6(t.d_queue),
                opt6(t.e_trans),
                opt6(t.e_comp),
                opt6(t.total_delay),
                opt6(t.total_energy),
                opt6(t.weighted_cost),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Long format: one row per (scheme, seed, slot, iteration).
pub fn write_convergence_csv<W: Write>(w: W, results: &[SlotResult]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "scheme",
        "optimizer",
        "seed",
        "slot",
        "iteration",
        "best_cost",
    ])?;
    for r in results {
        for (i, c) in r.trace.iter().enumerate() {
            out.write_record([
                r.scheme.to_string(),
                r.optimizer.name().to_string(),
                r.seed.to_string(),
                r.slot.to_string(),
                (i + 1).to_string(),
                sig6(*c),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_runs_csv<W: Write>(w: W, rows: &[RunRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "users",
        "eavesdroppers",
        "slots",
        "scheme",
        "seed",
        "psi_star",
        "rtp",
        "mean_delay_s",
        "mean_energy_j",
        "weighted_cost",
        "infeasible_slots",
    ])?;
    for r in rows {
        out.write_record([
            r.users.to_string(),
            r.eavesdroppers.to_string(),
            r.slots.to_string(),
            r.scheme.to_string(),
            r.seed.to_string(),
            sig6(r.psi_star),
            sig6(r.rtp),
            sig6(r.mean_delay_s),
            sig6(r.mean_energy_j),
            sig6(r.weighted_cost),
            r.infeasible_slots.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Pretty JSON at full precision (NaN becomes `null`).
pub fn write_summary_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}
