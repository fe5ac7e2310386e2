//! Text, PGM and JSON renderings of windows. All output is a pure function of
//! its input so repeated runs produce identical bytes.

use anyhow::{bail, Result};
use odoforge_core::toeplitz::{Symbol, ToeplitzWindow};
use odoforge_core::window::{Shape, Window};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Txt,
    Pgm,
}

/// One character per cell, `.` for holes, newline terminated unless empty.
pub fn window_text(window: &Window, x: &ToeplitzWindow) -> Result<String> {
    match window.shape {
        Shape::Line { .. } => {}
        Shape::List if window.is_empty() => return Ok(String::new()),
        _ => bail!("text export needs an integer interval window"),
    }
    let mut s = x.text();
    if !s.is_empty() {
        s.push('\n');
    }
    Ok(s)
}

/// Plain PGM (`P2`) of a grid window; `values[i]` is the gray level of cell `i`.
pub fn pgm(window: &Window, values: &[u32], maxval: u32) -> Result<String> {
    let (w, h) = match window.shape {
        Shape::Grid { x, y } => (span(x), span(y)),
        Shape::List if window.is_empty() => (0, 0),
        _ => bail!("PGM export needs a box window in ℤ²"),
    };
    let mut out = format!("P2\n{w} {h}\n{}\n", maxval.max(1));
    for row in values.chunks(w.max(1)) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

fn span((lo, hi): (i64, i64)) -> usize {
    if hi < lo {
        0
    } else {
        (hi - lo + 1) as usize
    }
}

/// Gray levels for symbols: 0 for holes, `i + 1` for the `i`-th letter.
pub fn symbol_levels(x: &ToeplitzWindow) -> (Vec<u32>, u32) {
    let levels = x
        .values
        .iter()
        .map(|s| match s {
            Symbol::Hole => 0,
            Symbol::Letter(c) => x.alphabet.iter().position(|a| a == c).map_or(0, |i| i as u32 + 1),
        })
        .collect();
    (levels, x.alphabet.len() as u32)
}

pub fn window_json(x: &ToeplitzWindow) -> Value {
    json!({
        "depth": x.depth,
        "alphabet": x.alphabet.iter().collect::<String>(),
        "cells": x.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "stages": x.stages,
        "text": x.text(),
    })
}

pub fn export_window(window: &Window, x: &ToeplitzWindow, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(pretty(&window_json(x))),
        Format::Txt => window_text(window, x),
        Format::Pgm => {
            let (levels, max) = symbol_levels(x);
            pgm(window, &levels, max)
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use odoforge_core::group::{dyadic_chain, zd_power_chain, GroupWord, WordKind};
    use odoforge_core::toeplitz::{generate_toeplitz, Marking};
    use odoforge_core::tower::TransversalTower;

    fn ruler(w: &Window) -> ToeplitzWindow {
        let c = dyadic_chain(6);
        let t = TransversalTower::build(&c, 6).unwrap();
        generate_toeplitz(&c, &t, &Marking::cyclic("ab").unwrap(), 6, &w.cells).unwrap()
    }

    #[test]
    fn ruler_text() {
        let w = Window::line(0, 7);
        assert_eq!(export_window(&w, &ruler(&w), Format::Txt).unwrap(), "abaaabab\n");
    }

    #[test]
    fn empty_windows_keep_headers() {
        let w = Window::parse(WordKind::Zd(1), "").unwrap();
        assert_eq!(export_window(&w, &ruler(&w), Format::Txt).unwrap(), "");
        assert_eq!(export_window(&w, &ruler(&w), Format::Pgm).unwrap(), "P2\n0 0\n2\n");
        let json = export_window(&w, &ruler(&w), Format::Json).unwrap();
        assert!(json.contains("\"cells\": []"));
    }

    #[test]
    fn grid_pgm() {
        let c = zd_power_chain(2, 3);
        let t = TransversalTower::build(&c, 3).unwrap();
        let w = Window::grid((0, 3), (0, 1));
        let x = generate_toeplitz(&c, &t, &Marking::cyclic("ab").unwrap(), 3, &w.cells).unwrap();
        let out = export_window(&w, &x, Format::Pgm).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(&lines[..3], ["P2", "4 2", "2"]);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[3].split(' ').count(), 4);
        assert!(export_window(&w, &x, Format::Txt).is_err());
        assert_eq!(x.cells[1], GroupWord::Zd(vec![1, 0]));
    }
}
