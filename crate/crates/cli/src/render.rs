use bellharness::fourier::io::SpectrumDocument;
use bellharness::fourier::{ExtremumSearch, InfeasibilityReason};
use bellharness::harness::{ReplayReport, SettingMode};
use bellharness::stats::{BooleReport, BOOLE_ATOMS};

use crate::commands::{CertificateOutput, FineOutput, RhoOutput, RunSummary, StationOutput};

fn fmt_rho(rho: Option<f64>) -> String {
    rho.map_or_else(|| "n/a".into(), |r| format!("{r:+.4}"))
}

pub fn run_summary(s: &RunSummary) {
    let c = &s.config;
    let who = match c.oracle {
        Some(_) => "singlet oracle".to_string(),
        None => format!("{} vs {}", c.alice, c.bob),
    };
    println!("{who}: {} trials on a {}-point grid", s.trials, c.grid.points());
    println!("digest {}", s.digest);
    match c.setting_mode {
        SettingMode::FixedDelta { delta_steps } => {
            let d = s.offsets.iter().find(|o| o.offset == delta_steps);
            let mean = d.map_or_else(|| "n/a".into(), |o| format!("{:+.4}", o.mean_xy));
            println!("offset {:.2} deg: E[xy] = {mean}", c.grid.theta(delta_steps).to_degrees());
        }
        SettingMode::FourPoint | SettingMode::UniformIndependent => {
            for cell in &s.correlations.cells {
                println!(
                    "rho{}{} = {} over {} trials",
                    cell.alice_label,
                    cell.bob_label,
                    fmt_rho(cell.rho),
                    cell.count
                );
            }
            if let Some(chsh) = s.chsh {
                println!("CHSH S = {chsh:+.4} (local bound 2)");
            }
        }
    }
    match (&s.verdict, &s.verdict_note) {
        (Some(v), _) => {
            let rate = v.success_rate.map_or_else(|| "n/a".into(), |r| format!("{r:.4}"));
            println!(
                "successes {}/{} (rate {rate}), P[S_N >= {} | p = {}] = {:.3e} (log10 {:.2})",
                v.successes, v.trials, v.threshold, v.null_p, v.p_value, v.log10_p_value
            );
        }
        (None, Some(note)) => println!("success test skipped: {note}"),
        (None, None) => {}
    }
}

pub fn spectrum(d: &SpectrumDocument) {
    let r = &d.report;
    println!("{}: {} tables, {}-point grid, seed {}", d.strategy, r.tables, r.grid_points, d.seed);
    println!("Parseval residual {:.2e}", r.parseval_residual);
    println!("power at k = +-1: {:.6} (total over both sides)", r.mass_pm1);
    println!("cosine fit: k_hat = {:.6}, rms residual {:.6}", r.cosine_fit.k_hat, r.cosine_fit.residual);
    let e = &r.exact_cosine;
    println!(
        "exact -cos: needs {:.4} per side, has {:.4} and {:.4}, shortfall {:.4}: {}",
        e.required_mass_per_side,
        e.observed_mass_plus1,
        e.observed_mass_minus1,
        e.shortfall,
        if e.reproduces_negative_cosine { "reproduced" } else { "not reproduced" }
    );
}

fn reason(r: &InfeasibilityReason) -> String {
    match r {
        InfeasibilityReason::PerfectAnticorrelation { required_c0, forced_c0 } => {
            format!("C(0) must be {required_c0:.3} but antipodal pairs force {forced_c0:.0}")
        }
        InfeasibilityReason::ParsevalDeficit { required_total, available_total, deficit } => {
            format!("needs total power {required_total:.3}, Parseval gives {available_total:.0} (deficit {deficit:.3})")
        }
        InfeasibilityReason::FirstCoefficientBound { required_per_side, max_per_side } => {
            format!("needs {required_per_side:.4} at k=+-1, tables reach at most {max_per_side:.4}")
        }
    }
}

pub fn certificate(out: &CertificateOutput) {
    if let Some(first) = out.reports.first() {
        let how = match &first.search {
            ExtremumSearch::Exhaustive { tables, argmax_count, argmax_are_half_planes } => format!(
                "exhaustive over {tables} tables, {argmax_count} maximizers{}",
                if *argmax_are_half_planes { ", all half-planes" } else { "" }
            ),
            ExtremumSearch::HalfPlaneCandidate => "half-plane candidate".into(),
        };
        println!("M = {}: max |A(1)| = {:.6} ({how})", out.grid_points, first.max_first_coefficient);
    }
    for r in &out.reports {
        let verdict = if r.feasible { "feasible" } else { "infeasible" };
        println!("k = {:.3}: {verdict}", r.target_amplitude);
        for why in &r.reasons {
            println!("  {}", reason(why));
        }
    }
}

pub fn rho(out: &RhoOutput) {
    println!(
        "S = {:+.6}{}",
        out.chsh,
        if out.exceeds_local_bound { " exceeds the local bound 2" } else { " within the local bound 2" }
    );
}

pub fn fine(out: &FineOutput) {
    let verdict = if out.report.lhv_representable { "LHV-REPRESENTABLE" } else { "VIOLATES" };
    println!("{verdict} ({} check)", out.mode);
    for c in &out.report.constraints {
        println!(
            "  {} {:<28} value {:+.6} slack {:+.6}",
            if c.satisfied { "ok " } else { "BAD" },
            c.name,
            c.value,
            c.slack
        );
    }
    println!("binding: {}", out.report.binding);
}

pub fn boole(r: &BooleReport) {
    if r.feasible {
        println!("feasible");
        if let Some(w) = r.witness {
            for (atom, weight) in BOOLE_ATOMS.iter().zip(w) {
                let signs: String = atom.iter().map(|&v| if v > 0 { '+' } else { '-' }).collect();
                println!("  XYZ = {signs}: {weight:.6}");
            }
        }
    } else {
        println!("infeasible");
        for c in &r.violated {
            println!("  violated: {} (value {:+.6})", c.name, c.value);
        }
    }
}

pub fn station(out: &StationOutput) {
    match &out.strategy {
        Some(s) => println!("{} played {s} for {} trials", out.role, out.trials),
        None => println!("{} sent {} hidden variables", out.role, out.trials),
    }
}

pub fn replay(r: &ReplayReport) {
    println!("stored    {}", r.stored_digest);
    println!("recomputed {}", r.recomputed_digest);
    println!("replayed  {}", r.replayed_digest);
    match (r.matches, r.first_mismatch) {
        (true, _) => println!("replay matches"),
        (false, Some(n)) => println!("MISMATCH at trial {n}"),
        (false, None) => println!("MISMATCH in digest"),
    }
}
