//! Deterministic CSV/JSON writers. Floats use Rust's shortest round-trip
//! formatting, and every file is written to a temporary sibling and renamed.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::bifurcation::ScanSample;
use crate::spectra::SpectralLevel;

pub(crate) fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, dir.join(name))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub(crate) fn write_json<T: Serialize + ?Sized>(
    dir: &Path,
    name: &str,
    value: &T,
) -> Result<(), super::Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())?;
    Ok(())
}

fn index_cell(s: &ScanSample) -> String {
    s.morse_index.map(|i| i.to_string()).unwrap_or_default()
}

pub(crate) fn scan_csv(samples: &[ScanSample], levels: &[SpectralLevel]) -> String {
    let mut out = String::from("r,h,alpha_sq,morse_index");
    for l in levels {
        let _ = write!(out, ",level_{}", l.value);
    }
    out.push('\n');
    for s in samples {
        let _ = write!(out, "{},{},{},{}", s.r, s.h, s.alpha_sq, index_cell(s));
        for l in levels {
            let _ = write!(out, ",{}", l.value);
        }
        out.push('\n');
    }
    out
}

pub(crate) fn write_scan_csv(
    dir: &Path,
    samples: &[ScanSample],
    levels: &[SpectralLevel],
) -> io::Result<()> {
    write_atomic(dir, "scan.csv", scan_csv(samples, levels).as_bytes())
}

pub(crate) fn write_index_csv(dir: &Path, samples: &[ScanSample]) -> io::Result<()> {
    let mut out = String::from("r,h,morse_index\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", s.r, s.h, index_cell(s));
    }
    write_atomic(dir, "index.csv", out.as_bytes())
}

pub(crate) fn write_spectrum_csv(dir: &Path, levels: &[SpectralLevel]) -> io::Result<()> {
    let mut out = String::from("value,multiplicity\n");
    for l in levels {
        let _ = writeln!(out, "{},{}", l.value, l.multiplicity);
    }
    write_atomic(dir, "spectrum.csv", out.as_bytes())
}
