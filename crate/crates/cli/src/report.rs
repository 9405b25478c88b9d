use odesc::escape::{SampleRun, WinnerTrace};
use odesc::interval::SolenoidalModel;
use odesc::rational::format_rational;
use serde::Serialize;

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Vec<u8> {
    writer.into_inner().expect("in-memory csv writer")
}

/// `n, [L_1..L_N,] tau_1..tau_N, winner, overlap, coarse`; depth columns
/// only when `with_depths`.
pub fn trace_csv(trace: &WinnerTrace, with_depths: bool) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let n = trace.holes;
    let mut header = vec!["n".to_string()];
    if with_depths {
        header.extend((1..=n).map(|i| format!("L_{i}")));
    }
    header.extend((1..=n).map(|i| format!("tau_{i}")));
    header.extend(["winner", "overlap", "coarse"].map(String::from));
    w.write_record(&header).expect("in-memory write");
    for r in &trace.records {
        let mut row = vec![r.n.to_string()];
        if with_depths {
            row.extend(r.depths.iter().map(ToString::to_string));
        }
        row.extend(r.taus.iter().map(ToString::to_string));
        row.push(r.winner.map_or(0, |i| i + 1).to_string());
        row.push(flag(r.overlap).into());
        row.push(flag(r.coarse).into());
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

/// `trial, point_seed, switch_count, wins_1..wins_N`.
pub fn sample_csv(run: &SampleRun, holes: usize) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["trial", "point_seed", "switch_count"].map(String::from).to_vec();
    header.extend((1..=holes).map(|i| format!("wins_{i}")));
    w.write_record(&header).expect("in-memory write");
    for r in &run.records {
        let mut row = vec![r.trial.to_string(), r.point_seed.to_string(), r.switch_count.to_string()];
        row.extend(r.wins.iter().map(ToString::to_string));
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    seed: u64,
    trials: u64,
    n_max: usize,
    /// `win_histograms[i][w]`: trials where hole `i + 1` won `w` scales.
    win_histograms: &'a [Vec<u64>],
    switch_histogram: &'a [u64],
    indecisive_counts: [u64; 3],
    fraction_indecisive: [Option<f64>; 3],
}

pub fn sample_summary_json(run: &SampleRun, seed: u64) -> Vec<u8> {
    let s = &run.summary;
    let summary = SummaryJson {
        seed,
        trials: s.trials,
        n_max: s.n_max,
        win_histograms: &s.win_histograms,
        switch_histogram: &s.switch_histogram,
        indecisive_counts: s.indecisive_counts,
        fraction_indecisive: [1, 2, 3].map(|h| s.fraction_indecisive(h)),
    };
    let mut bytes = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    bytes.push(b'\n');
    bytes
}

/// `label, left, right` for every interval of stage `k`, by label.
pub fn solenoid_csv(model: &SolenoidalModel, k: usize) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "left", "right"]).expect("in-memory write");
    for (label, interval) in model.stage(k).unwrap_or(&[]).iter().enumerate() {
        w.write_record([
            label.to_string(),
            format_rational(&interval.left),
            format_rational(&interval.right),
        ])
        .expect("in-memory write");
    }
    finish(w)
}
