//! JSON and CSV rendering of reports.
//!
//! Every float is written with 17 significant digits (`%.17g` style) so repeated
//! runs diff exactly and values re-parse to the same bits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::analysis::StructureReport;
use crate::dynamics::{DynamicsTrace, Player};
use crate::mixed::MixedComparison;
use crate::montecarlo::MonteCarloEstimate;

/// Formats `x` like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        format!(
            "{}e{}{:02}",
            trim_fraction(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON formatter that writes floats through [`fmt_g17`].
struct G17Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for G17Formatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_g17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` as pretty JSON with 17-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, G17Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// A report that can be laid out as a CSV table.
pub trait CsvTable {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

/// Renders a table with a header row and comma delimiters.
pub fn to_csv(table: &dyn CsvTable) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(table.header()).expect("in-memory write");
    for row in table.rows() {
        wtr.write_record(row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("csv writes UTF-8")
}

fn strings<const N: usize>(names: [&str; N]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl CsvTable for StructureReport {
    fn header(&self) -> Vec<String> {
        strings(["lambda", "pe"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(l, v)| vec![fmt_g17(*l), fmt_g17(*v)])
            .collect()
    }
}

impl CsvTable for DynamicsTrace {
    fn header(&self) -> Vec<String> {
        let dim = self.steps.first().map_or(0, |s| s.profile.w.len());
        let mut h = strings(["half_step", "player", "lambda"]);
        h.extend((0..dim).map(|j| format!("w{j}")));
        h.push("pe".into());
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.steps
            .iter()
            .map(|s| {
                let player = match s.player {
                    Player::Initial => "initial",
                    Player::Network => "network",
                    Player::Jammer => "jammer",
                };
                let mut row = vec![
                    s.half_step.to_string(),
                    player.into(),
                    fmt_g17(s.profile.threshold),
                ];
                row.extend(s.profile.w.iter().map(|x| fmt_g17(*x)));
                row.push(fmt_g17(s.error_probability));
                row
            })
            .collect()
    }
}

impl CsvTable for MonteCarloEstimate {
    fn header(&self) -> Vec<String> {
        strings(["estimate", "trials", "stderr", "seed"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            fmt_g17(self.estimate),
            self.trials.to_string(),
            fmt_g17(self.stderr),
            self.seed.to_string(),
        ]]
    }
}

impl CsvTable for MixedComparison {
    fn header(&self) -> Vec<String> {
        strings([
            "utility",
            "pure",
            "advantage",
            "projected_variance",
            "threshold",
        ])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![[
            self.utility,
            self.pure,
            self.advantage,
            self.projected_variance,
            self.threshold,
        ]
        .iter()
        .map(|x| fmt_g17(*x))
        .collect()]
    }
}
