use std::path::Path;

use qcausal::report::{
    classify, Certificate, ClassificationReport, ClassifyOptions, DirectionReport, Localizability,
    Witness,
};

use crate::{read_artifact, CliResult, Failure};

pub fn run(path: &Path, opts: &ClassifyOptions, json: bool) -> CliResult {
    let artifact = read_artifact(path)?;
    let report = classify(&artifact, opts)?;
    report
        .check_consistency()
        .map_err(|e| Failure::Invariant(e.to_string()))?;
    if json {
        let text = serde_json::to_string_pretty(&report).expect("plain data");
        println!("{text}");
    } else {
        print!("{}", render(&report));
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn direction_line(label: &str, r: &DirectionReport) -> String {
    let state = if r.semicausal { "blocked" } else { "open" };
    let criterion = serde_json::to_value(r.criterion).expect("unit enum");
    let mut line = format!(
        "{label:<14}{state} [{}] (Choi deviation {:.2e})",
        criterion.as_str().unwrap_or_default(),
        r.choi_deviation
    );
    if let Some(w) = &r.witness {
        let kind = match w {
            Witness::Constructive(_) => "constructive",
            Witness::Search(_) => "search",
        };
        line.push_str(&format!(
            "\n{:<14}{kind} witness, trace distance {:.6}",
            "",
            w.separation()
        ));
    }
    line
}

fn render(r: &ClassificationReport) -> String {
    let mut out = String::new();
    let i = &r.input;
    let kind = if i.kind == "basis" {
        format!("basis of {} vectors", i.kraus_count)
    } else if i.complete_measurement {
        format!(
            "channel, {} Kraus operators (complete measurement)",
            i.kraus_count
        )
    } else {
        format!("channel, {} Kraus operators", i.kraus_count)
    };
    out.push_str(&format!(
        "{:<14}{kind} on {}x{}\n",
        "input", i.dim_a, i.dim_b
    ));
    out.push_str(&format!(
        "{:<14}{} (deviation {:.2e})\n",
        "trace pres.",
        yes_no(r.tp.tp),
        r.tp.deviation
    ));
    out.push_str(&direction_line("Bob -> Alice", &r.b_to_a));
    out.push('\n');
    out.push_str(&direction_line("Alice -> Bob", &r.a_to_b));
    out.push('\n');
    out.push_str(&format!("{:<14}{}\n", "causal", yes_no(r.causal)));
    if r.semilocalizable.is_some() {
        out.push_str(&format!(
            "{:<14}yes, one-way protocol from Alice to Bob\n",
            "semilocal"
        ));
    }
    if let Some(dims) = &r.structure.alice_subspaces {
        out.push_str(&format!("{:<14}{dims:?}\n", "Alice blocks"));
    }
    if let Some(dims) = &r.structure.bob_subspaces {
        out.push_str(&format!("{:<14}{dims:?}\n", "Bob blocks"));
    }
    if let Some((d, ra, rb)) = r.structure.grid {
        out.push_str(&format!("{:<14}d = {d}, {ra} x {rb} cells\n", "grid"));
    }
    let loc = match &r.localizability {
        Localizability::LocalizableByConstruction { construction } => {
            format!("localizable: {construction}")
        }
        Localizability::NotLocalizable { certificates } => {
            let parts: Vec<String> = certificates
                .iter()
                .map(|c| match c {
                    Certificate::Game(g) => format!("game value {:.6} > {:.6}", g.value, g.bound),
                    Certificate::Obstruction(o) => {
                        format!("{:?} (residual {:.3e})", o.kind, o.residual)
                    }
                })
                .collect();
            format!("not localizable: {}", parts.join("; "))
        }
        Localizability::NotCausal => "not localizable: not causal".into(),
        Localizability::Undetermined => "undetermined".into(),
    };
    out.push_str(&format!("{:<14}{loc}\n", "localizable"));
    if let Some(v) = r.game_value {
        out.push_str(&format!("{:<14}{v:.6}\n", "game value"));
    }
    out
}
