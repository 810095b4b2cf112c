//! Per-instance evaluation, grouping, summary tables and histograms.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::evaluate_map;
use crate::ingest::{load_instance, GroundingInstance};
use crate::model::{InstanceMetrics, MetricConfig};

/// Loads an instance and scores it; errors carry the instance id.
pub fn evaluate_instance(inst: &GroundingInstance, cfg: &MetricConfig) -> Result<InstanceMetrics> {
    let (map, gt) = load_instance(inst).map_err(|e| e.in_instance(&inst.id))?;
    evaluate_map(&map, &gt, cfg).map_err(|e| e.in_instance(&inst.id))
}

/// One line of `instances.records`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub dataset: String,
    pub split: String,
    pub setting: String,
    pub model: String,
    #[serde(flatten)]
    pub metrics: InstanceMetrics,
}

impl InstanceRecord {
    pub fn new(inst: &GroundingInstance, metrics: InstanceMetrics) -> Self {
        InstanceRecord {
            id: inst.id.clone(),
            dataset: inst.dataset.clone(),
            split: inst.split.clone(),
            setting: inst.setting.to_string(),
            model: inst.model.clone(),
            metrics,
        }
    }
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<InstanceRecord>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn records_to_string(records: &[InstanceRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// The scalar scores a histogram can be drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    IouSoft,
    IouBinary,
    DiceSoft,
    DiceBinary,
    WdpSoft,
    WdpBinary,
    IoRatio,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::IouSoft,
        Metric::IouBinary,
        Metric::DiceSoft,
        Metric::DiceBinary,
        Metric::WdpSoft,
        Metric::WdpBinary,
        Metric::IoRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::IouSoft => "iou_soft",
            Metric::IouBinary => "iou_binary",
            Metric::DiceSoft => "dice_soft",
            Metric::DiceBinary => "dice_binary",
            Metric::WdpSoft => "wdp_soft",
            Metric::WdpBinary => "wdp_binary",
            Metric::IoRatio => "io_ratio",
        }
    }

    pub fn value(self, m: &InstanceMetrics) -> f64 {
        m.scalars()[self as usize]
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_owned()))
    }
}

/// Which instance tags form a summary group. Unused tags print as `*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupBy {
    pub dataset: bool,
    pub split: bool,
    pub setting: bool,
    pub model: bool,
}

impl Default for GroupBy {
    fn default() -> Self {
        GroupBy {
            dataset: true,
            split: true,
            setting: true,
            model: true,
        }
    }
}

impl GroupBy {
    pub const DATASET_MODEL: GroupBy = GroupBy {
        dataset: true,
        split: false,
        setting: false,
        model: true,
    };

    pub fn key(&self, r: &InstanceRecord) -> GroupKey {
        let pick = |on: bool, v: &str| if on { v.to_owned() } else { "*".to_owned() };
        GroupKey {
            dataset: pick(self.dataset, &r.dataset),
            split: pick(self.split, &r.split),
            setting: pick(self.setting, &r.setting),
            model: pick(self.model, &r.model),
        }
    }
}

impl FromStr for GroupBy {
    type Err = Error;

    /// Comma-separated subset of `dataset,split,setting,model`.
    fn from_str(s: &str) -> Result<Self> {
        let mut g = GroupBy {
            dataset: false,
            split: false,
            setting: false,
            model: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "dataset" => g.dataset = true,
                "split" => g.split = true,
                "setting" => g.setting = true,
                "model" => g.model = true,
                other => return Err(Error::InvalidParameter(format!("unknown group key `{other}`"))),
            }
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub dataset: String,
    pub split: String,
    pub setting: String,
    pub model: String,
}

/// Groups records by key in order of first appearance.
pub fn group_records<'a>(records: &'a [InstanceRecord], by: &GroupBy) -> Vec<(GroupKey, Vec<&'a InstanceRecord>)> {
    let mut index: HashMap<GroupKey, usize> = HashMap::new();
    let mut groups: Vec<(GroupKey, Vec<&InstanceRecord>)> = Vec::new();
    for r in records {
        let key = by.key(r);
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(r);
    }
    groups
}

/// One dataset x model (x split x setting) summary line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub split: String,
    pub setting: String,
    pub model: String,
    pub mean_iou_soft: f64,
    pub mean_iou_binary: f64,
    pub mean_dice_soft: f64,
    pub mean_dice_binary: f64,
    pub mean_wdp_soft: f64,
    pub mean_wdp_binary: f64,
    pub mean_io_ratio: f64,
    pub pg_accuracy_percent: f64,
    pub pg_uncertain_count: usize,
    pub total: usize,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn aggregate<'a, I>(records: I, key: &GroupKey) -> Result<SummaryRow>
where
    I: IntoIterator<Item = &'a InstanceMetrics>,
{
    let mut sums = [CompensatedSum::default(); 7];
    let mut hits = 0usize;
    let mut uncertain = 0usize;
    let mut total = 0usize;
    for m in records {
        for (s, v) in sums.iter_mut().zip(m.scalars()) {
            s.add(v);
        }
        hits += usize::from(m.pg_hit);
        uncertain += usize::from(m.pg_uncertain);
        total += 1;
    }
    if total == 0 {
        return Err(Error::EmptyGroup);
    }
    let n = total as f64;
    let mean = |k: usize| sums[k].value() / n;
    Ok(SummaryRow {
        dataset: key.dataset.clone(),
        split: key.split.clone(),
        setting: key.setting.clone(),
        model: key.model.clone(),
        mean_iou_soft: mean(0),
        mean_iou_binary: mean(1),
        mean_dice_soft: mean(2),
        mean_dice_binary: mean(3),
        mean_wdp_soft: mean(4),
        mean_wdp_binary: mean(5),
        mean_io_ratio: mean(6),
        pg_accuracy_percent: 100.0 * hits as f64 / n,
        pg_uncertain_count: uncertain,
        total,
    })
}

/// Aggregates every group, in first-appearance order.
pub fn summarize(records: &[InstanceRecord], by: &GroupBy) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::EmptyGroup);
    }
    group_records(records, by)
        .into_iter()
        .map(|(key, rs)| aggregate(rs.into_iter().map(|r| &r.metrics), &key))
        .collect()
}

/// Rounds half away from zero to two decimals.
pub fn fmt2(x: f64) -> String {
    format!("{:.2}", (x * 100.0).round() / 100.0)
}

pub fn fmt_uncertainty(count: usize, total: usize) -> String {
    format!("{count} / {total}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Markdown,
    Csv,
    Structured,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            "structured" | "json" => Ok(TableFormat::Structured),
            other => Err(Error::InvalidParameter(format!("unknown table format `{other}`"))),
        }
    }
}

pub const TABLE_HEADER: [&str; 13] = [
    "Dataset",
    "Split",
    "Setting",
    "Model",
    "IoU Soft",
    "IoU Binary",
    "Dice Soft",
    "Dice Binary",
    "WDP Soft",
    "WDP Binary",
    "IO_ratio LogSig",
    "PG Accuracy",
    "PG Uncertainty",
];

const METRIC_COLUMNS: usize = 9;

/// `true` where larger is better, per metric column.
const HIGHER_IS_BETTER: [bool; METRIC_COLUMNS] = [true, true, true, true, false, false, true, true, false];

fn printed_cells(row: &SummaryRow) -> [String; METRIC_COLUMNS] {
    [
        fmt2(row.mean_iou_soft),
        fmt2(row.mean_iou_binary),
        fmt2(row.mean_dice_soft),
        fmt2(row.mean_dice_binary),
        fmt2(row.mean_wdp_soft),
        fmt2(row.mean_wdp_binary),
        fmt2(row.mean_io_ratio),
        fmt2(row.pg_accuracy_percent),
        fmt_uncertainty(row.pg_uncertain_count, row.total),
    ]
}

/// Comparable score for a column at printed precision.
fn printed_score(row: &SummaryRow, col: usize) -> f64 {
    let hundredths = |x: f64| (x * 100.0).round();
    match col {
        0 => hundredths(row.mean_iou_soft),
        1 => hundredths(row.mean_iou_binary),
        2 => hundredths(row.mean_dice_soft),
        3 => hundredths(row.mean_dice_binary),
        4 => hundredths(row.mean_wdp_soft),
        5 => hundredths(row.mean_wdp_binary),
        6 => hundredths(row.mean_io_ratio),
        7 => hundredths(row.pg_accuracy_percent),
        _ => row.pg_uncertain_count as f64 / row.total.max(1) as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Highlight {
    None,
    Best,
    SecondBest,
}

/// Best / second-best marks per (dataset, split, setting) block, compared
/// across models at printed precision. Tied values share a mark.
pub fn highlights(rows: &[SummaryRow]) -> Vec<[Highlight; METRIC_COLUMNS]> {
    let mut marks = vec![[Highlight::None; METRIC_COLUMNS]; rows.len()];
    type Block<'a> = ((&'a str, &'a str, &'a str), Vec<usize>);
    let mut blocks: Vec<Block> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let k = (r.dataset.as_str(), r.split.as_str(), r.setting.as_str());
        match blocks.iter_mut().find(|(bk, _)| *bk == k) {
            Some((_, members)) => members.push(i),
            None => blocks.push((k, vec![i])),
        }
    }
    for (_, members) in &blocks {
        for col in 0..METRIC_COLUMNS {
            let mut distinct: Vec<f64> = members.iter().map(|&i| printed_score(&rows[i], col)).collect();
            distinct.sort_by(|a, b| {
                if HIGHER_IS_BETTER[col] {
                    b.total_cmp(a)
                } else {
                    a.total_cmp(b)
                }
            });
            distinct.dedup();
            for &i in members {
                let s = printed_score(&rows[i], col);
                marks[i][col] = if Some(&s) == distinct.first() {
                    Highlight::Best
                } else if Some(&s) == distinct.get(1) {
                    Highlight::SecondBest
                } else {
                    Highlight::None
                };
            }
        }
    }
    marks
}

fn row_fields(row: &SummaryRow) -> [String; 4] {
    [
        row.dataset.clone(),
        row.split.clone(),
        row.setting.clone(),
        row.model.clone(),
    ]
}

pub fn render_table(rows: &[SummaryRow], format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Markdown => Ok(render_markdown(rows)),
        TableFormat::Csv => render_csv(rows),
        TableFormat::Structured => {
            let mut s = serde_json::to_string_pretty(rows)?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn render_markdown(rows: &[SummaryRow]) -> String {
    let marks = highlights(rows);
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", TABLE_HEADER.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(TABLE_HEADER.len()));
    for (row, mark) in rows.iter().zip(&marks) {
        let mut cells: Vec<String> = row_fields(row).into();
        for (cell, m) in printed_cells(row).into_iter().zip(mark) {
            cells.push(match m {
                Highlight::Best => format!("**{cell}**"),
                Highlight::SecondBest => format!("<u>{cell}</u>"),
                Highlight::None => cell,
            });
        }
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}

fn render_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TABLE_HEADER)?;
    for row in rows {
        let mut cells: Vec<String> = row_fields(row).into();
        cells.extend(printed_cells(row));
        w.write_record(&cells)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A summary row as read back from `summary.csv`, at printed precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSummaryRow {
    pub dataset: String,
    pub split: String,
    pub setting: String,
    pub model: String,
    /// The eight decimal columns in table order.
    pub values: [f64; 8],
    pub pg_uncertain_count: usize,
    pub total: usize,
}

pub fn parse_summary_csv(text: &str) -> Result<Vec<ParsedSummaryRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(TABLE_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: "unexpected summary header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("bad {what}"),
        };
        let mut values = [0.0; 8];
        for (k, v) in values.iter_mut().enumerate() {
            *v = rec[4 + k].parse().map_err(|_| bad(TABLE_HEADER[4 + k]))?;
        }
        let (count, total) = rec[12].split_once(" / ").ok_or_else(|| bad("uncertainty"))?;
        out.push(ParsedSummaryRow {
            dataset: rec[0].to_owned(),
            split: rec[1].to_owned(),
            setting: rec[2].to_owned(),
            model: rec[3].to_owned(),
            values,
            pg_uncertain_count: count.parse().map_err(|_| bad("uncertainty"))?,
            total: total.parse().map_err(|_| bad("uncertainty"))?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub metric: String,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

pub const DEFAULT_BINS: usize = 20;

/// Uniform bins over `[0, 1]`; the last bin is closed on the right.
pub fn histogram(metric: &str, values: &[f64], bins: usize) -> Result<HistogramSpec> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let bin_edges: Vec<f64> = (0..=bins).map(|k| k as f64 / bins as f64).collect();
    let mut counts = vec![0u64; bins];
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange(v));
        }
        let mut idx = ((v * bins as f64) as usize).min(bins - 1);
        // Settle rounding at the edges so the bin agrees with `bin_edges`.
        if idx > 0 && v < bin_edges[idx] {
            idx -= 1;
        } else if idx + 1 < bins && v >= bin_edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    Ok(HistogramSpec {
        metric: metric.to_owned(),
        bin_edges,
        counts,
    })
}

impl HistogramSpec {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bin_left", "bin_right", "count"])?;
        for (k, c) in self.counts.iter().enumerate() {
            w.write_record([
                self.bin_edges[k].to_string(),
                self.bin_edges[k + 1].to_string(),
                c.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// A plain bar chart.
    pub fn to_svg(&self, title: &str) -> String {
        let (width, height, margin) = (480.0, 240.0, 30.0);
        let plot_w = width - 2.0 * margin;
        let plot_h = height - 2.0 * margin;
        let max = self.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
        let bar_w = plot_w / self.counts.len().max(1) as f64;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="18" font-size="12" text-anchor="middle">{}</text>"#,
            width / 2.0,
            escape_xml(title)
        );
        for (k, &c) in self.counts.iter().enumerate() {
            let h = plot_h * c as f64 / max;
            let _ = writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4a7fb5"><title>[{}, {}): {}</title></rect>"##,
                margin + k as f64 * bar_w,
                margin + plot_h - h,
                (bar_w - 1.0).max(0.5),
                h,
                self.bin_edges[k],
                self.bin_edges[k + 1],
                c
            );
        }
        let _ = writeln!(
            s,
            r#"<line x1="{m}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/>"#,
            m = margin,
            y = margin + plot_h,
            x2 = margin + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{m}" y="{y}" font-size="10">0</text><text x="{x2}" y="{y}" font-size="10" text-anchor="end">1</text>"#,
            m = margin,
            y = height - 12.0,
            x2 = margin + plot_w
        );
        s.push_str("</svg>\n");
        s
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A histogram plus the file stem it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedHistogram {
    pub stem: String,
    pub group: GroupKey,
    pub spec: HistogramSpec,
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '-' })
        .collect()
}

/// One histogram per metric per group.
///
/// With a single group the files are `hist_<metric>`; otherwise the used
/// group tags are appended, e.g. `hist_io_ratio__flickr30k__albef`.
pub fn histograms_for(
    records: &[InstanceRecord],
    metrics: &[Metric],
    by: &GroupBy,
    bins: usize,
) -> Result<Vec<NamedHistogram>> {
    let groups = group_records(records, by);
    let single = groups.len() == 1;
    let mut out = Vec::new();
    for metric in metrics {
        for (key, rs) in &groups {
            let values: Vec<f64> = rs.iter().map(|r| metric.value(&r.metrics)).collect();
            let mut stem = format!("hist_{}", metric.name());
            if !single {
                for (on, tag) in [
                    (by.dataset, &key.dataset),
                    (by.split, &key.split),
                    (by.setting, &key.setting),
                    (by.model, &key.model),
                ] {
                    if on {
                        stem.push_str("__");
                        stem.push_str(&slug(tag));
                    }
                }
            }
            out.push(NamedHistogram {
                stem,
                group: key.clone(),
                spec: histogram(metric.name(), &values, bins)?,
            });
        }
    }
    Ok(out)
}

fn group_title(metric: &str, key: &GroupKey) -> String {
    let tags: Vec<&str> = [&key.dataset, &key.split, &key.setting, &key.model]
        .into_iter()
        .map(String::as_str)
        .filter(|t| *t != "*")
        .collect();
    if tags.is_empty() {
        metric.to_owned()
    } else {
        format!("{metric} ({})", tags.join(", "))
    }
}

/// Writes histogram CSVs (and SVGs when asked); returns the created paths.
pub fn write_histograms(hists: &[NamedHistogram], out_dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let result = (|| {
        for h in hists {
            let p = out_dir.join(format!("{}.csv", h.stem));
            fs::write(&p, h.spec.to_csv()?)?;
            written.push(p);
            if svg {
                let p = out_dir.join(format!("{}.svg", h.stem));
                fs::write(&p, h.spec.to_svg(&group_title(&h.spec.metric, &h.group)))?;
                written.push(p);
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            remove_all(&written);
            Err(e)
        }
    }
}

pub(crate) fn remove_all(paths: &[PathBuf]) {
    for p in paths {
        let _ = fs::remove_file(p);
    }
}

pub const SUMMARY_MD: &str = "summary.md";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_STRUCTURED: &str = "summary.structured";
pub const INSTANCE_RECORDS: &str = "instances.records";

/// Writes records, the summary in all three formats, and histograms.
///
/// On failure every file created by this call is removed again.
pub fn write_outputs(
    records: &[InstanceRecord],
    rows: &[SummaryRow],
    hists: &[NamedHistogram],
    out_dir: &Path,
    svg: bool,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() || rows.is_empty() {
        return Err(Error::EmptyGroup);
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let result = (|| {
        let files = [
            (INSTANCE_RECORDS, records_to_string(records)?),
            (SUMMARY_MD, render_table(rows, TableFormat::Markdown)?),
            (SUMMARY_CSV, render_table(rows, TableFormat::Csv)?),
            (SUMMARY_STRUCTURED, render_table(rows, TableFormat::Structured)?),
        ];
        for (name, body) in files {
            let p = out_dir.join(name);
            fs::write(&p, body)?;
            written.push(p);
        }
        written.extend(write_histograms(hists, out_dir, svg)?);
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            remove_all(&written);
            Err(e)
        }
    }
}
