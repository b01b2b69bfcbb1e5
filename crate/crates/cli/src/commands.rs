use std::fs;
use std::io::{ErrorKind, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use gazepinch::trace::{self, Label, Metrics};
use gazepinch::{Error, Scene};

use crate::config::CliConfig;
use crate::Failure;

fn read(path: &Path, what: &str) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {what} {}", path.display()))
        .map_err(Failure::Usage)
}

/// Standard output; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Failure::Usage(anyhow!(e).context("cannot write to stdout"))),
        _ => Ok(()),
    }
}

fn write(path: &Path, what: &str, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {what} {}", path.display()))
        .map_err(Failure::Usage)
}

pub fn load_scene(config: &CliConfig, path: &Path) -> Result<Scene, Failure> {
    let text = read(path, "scene")?;
    let mut scene = Scene::from_json(&text)
        .with_context(|| format!("scene {}", path.display()))
        .map_err(Failure::Usage)?;
    config
        .scene
        .apply(&mut scene)
        .with_context(|| format!("scene {}", path.display()))
        .map_err(Failure::Usage)?;
    Ok(scene)
}

pub fn generate(config: &CliConfig, scene: &Path, trace_out: &Path, labels_out: &Path) -> Result<(), Failure> {
    let scene = load_scene(config, scene)?;
    let generated = trace::generate(&scene, &config.generate)
        .context("generate")
        .map_err(Failure::Usage)?;
    write(trace_out, "trace", &trace::write_trace(&generated.trace))?;
    let labels = serde_json::to_string_pretty(&generated.labels).expect("labels serialize") + "\n";
    write(labels_out, "labels", &labels)?;
    Ok(())
}

pub fn replay(config: &CliConfig, scene: &Path, trace_in: &Path, events_out: Option<&Path>) -> Result<(), Failure> {
    let scene = load_scene(config, scene)?;
    let text = read(trace_in, "trace")?;
    let data_error = |e: Error| Failure::Data(anyhow!(e).context(format!("trace {}", trace_in.display())));
    let records = trace::parse_trace(&text).map_err(data_error)?;
    let events = trace::replay(&records, &scene, &config.fusion).map_err(data_error)?;
    let log = trace::write_events(&events);
    match events_out {
        Some(path) => write(path, "event log", &log),
        None => emit(&log),
    }
}

pub fn evaluate(events: &Path, labels: &Path) -> Result<(), Failure> {
    let event_text = read(events, "event log")?;
    let events = trace::parse_events(&event_text)
        .map_err(|e| Failure::Data(anyhow!(e).context(format!("event log {}", events.display()))))?;
    let label_text = read(labels, "labels")?;
    let labels: Vec<Label> = serde_json::from_str(&label_text)
        .map_err(|e| Failure::Data(anyhow!(e).context(format!("labels {}", labels.display()))))?;
    let metrics = trace::evaluate(&events, &labels).map_err(|e| Failure::Usage(anyhow!(e)))?;
    let json = serde_json::to_string(&metrics).expect("metrics serialize");
    emit(&format!("{json}\n{}", table(&metrics)))
}

fn table(m: &Metrics) -> String {
    let rows: [(&str, String); 11] = [
        ("trials", m.trials.to_string()),
        ("correct selections", m.correct_selections.to_string()),
        ("failed", m.failed.to_string()),
        ("wrong target", m.wrong_target.to_string()),
        ("early triggered", m.early_triggered.to_string()),
        ("late triggered", m.late_triggered.to_string()),
        ("mean resolution latency", format!("{:.1} ms", m.mean_resolution_latency_ms)),
        ("midas events", m.midas_events.to_string()),
        ("object losses", m.object_losses.to_string()),
        ("expectation met", m.expectation_met.to_string()),
        ("accuracy", format!("{:.3}", m.accuracy)),
    ];
    let mut out = String::from("\n");
    for (name, value) in rows {
        out.push_str(&format!("  {name:<26}{value:>10}\n"));
    }
    out
}
