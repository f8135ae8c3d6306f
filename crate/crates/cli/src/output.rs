//! Buffered output files committed by temp-file-and-rename, and the
//! generated gnuplot scripts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gmsk_wsn::energy::Variant;
use gmsk_wsn::fec::CodeKind;

/// Files held in memory until every computation has finished.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, contents: Vec<u8>) {
        self.files.push((name.into(), contents));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    /// Writes every file to `dir` through a temporary sibling and a rename,
    /// so readers never observe a partial file.
    pub fn commit(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let target = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
            {
                let mut f = fs::File::create(&tmp)?;
                f.write_all(contents)?;
                f.sync_all()?;
            }
            fs::rename(&tmp, &target)?;
            written.push(target);
        }
        Ok(written)
    }
}

pub fn ber_gnuplot(kinds: &[CodeKind]) -> String {
    let mut s = String::from(
        "set terminal pngcairo size 800,600\n\
         set output 'ber.png'\n\
         set datafile separator ','\n\
         set logscale y\n\
         set format y '10^{%L}'\n\
         set xlabel 'Eb/N0 (dB)'\n\
         set ylabel 'BER'\n\
         set grid\n\
         set key bottom left\n\
         plot ",
    );
    let plots: Vec<String> = kinds
        .iter()
        .map(|k| {
            format!(
                "'ber_{0}.csv' every ::1 using 1:($3 > 0 ? $3 : 1/0) with linespoints title '{0}'",
                k.label()
            )
        })
        .collect();
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

pub fn energy_gnuplot(variants: &[Variant]) -> String {
    let mut s = String::from(
        "set terminal pngcairo size 800,600\n\
         set output 'energy_distance.png'\n\
         set datafile separator ','\n\
         set logscale y\n\
         set xlabel 'distance (m)'\n\
         set ylabel 'energy per information bit (J)'\n\
         set grid\n\
         set key top left\n\
         plot 'energy_distance.csv' every ::1 using 1:2 with lines title 'uncoded'",
    );
    for (i, v) in variants.iter().enumerate() {
        s.push_str(&format!(
            ", \\\n     'energy_distance.csv' every ::1 using 1:{} with lines title 'coded ({})'",
            3 + i,
            v.label()
        ));
    }
    s.push('\n');
    s
}
