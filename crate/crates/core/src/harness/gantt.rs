use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{check_feasibility, Schedule, CAPACITY_TOLERANCE};

const LEFT: f64 = 60.0;
const TOP: f64 = 20.0;
const BAND: f64 = 120.0;
const GAP: f64 = 20.0;
const AXIS: f64 = 30.0;

const PALETTE: [&str; 8] = ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5"];

/// Layout search budget per machine.
const LAYOUT_NODES: usize = 200_000;

struct Stacker<'a> {
    // (start, end, demand) in placement order
    jobs: &'a [(f64, f64, f64)],
    offsets: Vec<f64>,
    nodes: usize,
}

impl Stacker<'_> {
    fn place(&mut self, k: usize) -> bool {
        if k == self.jobs.len() {
            return true;
        }
        self.nodes += 1;
        if self.nodes > LAYOUT_NODES {
            return false;
        }
        let (s, e, d) = self.jobs[k];
        let live: Vec<(f64, f64)> = (0..k)
            .filter(|&i| self.jobs[i].0 < e && s < self.jobs[i].1)
            .map(|i| (self.offsets[i], self.offsets[i] + self.jobs[i].2))
            .collect();
        // The lowest fit is always 0 or the top of a live job; the other
        // candidates only matter once the search backtracks.
        let mut candidates: Vec<f64> = [0.0, 1.0 - d]
            .into_iter()
            .chain(live.iter().flat_map(|&(lo, hi)| [hi, lo - d]))
            .filter(|&y| y >= -CAPACITY_TOLERANCE && y + d <= 1.0 + CAPACITY_TOLERANCE)
            .map(|y| y.max(0.0))
            .collect();
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        for y in candidates {
            let clear = live
                .iter()
                .all(|&(lo, hi)| y + d <= lo + CAPACITY_TOLERANCE || y >= hi - CAPACITY_TOLERANCE);
            if clear {
                self.offsets[k] = y;
                if self.place(k + 1) {
                    return true;
                }
            }
        }
        false
    }
}

/// Capacity offset of every job. Jobs are taken by start time (then index)
/// and each gets the lowest offset clear of the jobs already stacked over
/// its time interval on the same machine. When that greedy choice strands a
/// later job, a bounded backtracking search tries other offsets.
pub fn layout_offsets(schedule: &Schedule) -> Result<Vec<f64>> {
    let inst = schedule.instance();
    let mut offsets = vec![0.0; inst.len()];
    for m in 0..schedule.machines() {
        let mut order: Vec<_> = schedule.on_machine(m).collect();
        order.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.job.cmp(&b.job)));
        let jobs: Vec<(f64, f64, f64)> =
            order.iter().map(|a| (a.start, a.start + inst.job(a.job).p, inst.job(a.job).d)).collect();
        let mut stacker = Stacker { jobs: &jobs, offsets: vec![0.0; jobs.len()], nodes: 0 };
        if !stacker.place(0) {
            return Err(Error::Render(format!("no contiguous capacity stacking found on machine {m}")));
        }
        for (a, y) in order.iter().zip(stacker.offsets) {
            offsets[a.job] = y;
        }
    }
    Ok(offsets)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Standalone SVG with one band per machine. Pack schedules also get a
/// dashed rule at every iteration interval boundary.
pub fn render_gantt(schedule: &Schedule) -> Result<String> {
    if !schedule.is_complete() {
        return Err(Error::Render("schedule has unassigned jobs".into()));
    }
    let report = check_feasibility(schedule)?;
    if !report.is_feasible() {
        return Err(Error::Render(format!("schedule is infeasible ({} violations)", report.violations.len())));
    }
    let offsets = layout_offsets(schedule)?;
    let inst = schedule.instance();

    let horizon = schedule.makespan().max(1.0);
    let scale = (800.0 / horizon).clamp(4.0, 80.0);
    let plot_w = horizon * scale;
    let machines = schedule.machines();
    let width = LEFT + plot_w + 20.0;
    let height = TOP + machines as f64 * (BAND + GAP) + AXIS;
    let x = |t: f64| LEFT + t * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<title>{} schedule</title>"#, escape(schedule.algorithm()));
    for m in 0..machines {
        let top = TOP + m as f64 * (BAND + GAP);
        let _ = writeln!(
            svg,
            r##"<rect class="band" x="{:.2}" y="{top:.2}" width="{plot_w:.2}" height="{BAND:.2}" fill="#f7f7f7" stroke="#999"/>"##,
            x(0.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">M{}</text>"#,
            LEFT - 8.0,
            top + BAND / 2.0 + 4.0,
            m + 1
        );
    }
    for a in schedule.assignments() {
        let job = inst.job(a.job);
        let top = TOP + a.machine as f64 * (BAND + GAP);
        // capacity grows upwards from the band's bottom edge
        let y = top + BAND * (1.0 - offsets[a.job] - job.d);
        let (rx, rw, rh) = (x(a.start), job.p * scale, job.d * BAND);
        let _ = writeln!(
            svg,
            r##"<rect class="job" data-job="{id}" x="{rx:.2}" y="{y:.2}" width="{rw:.2}" height="{rh:.2}" fill="{fill}" stroke="#333"/>"##,
            id = escape(&job.id),
            fill = PALETTE[a.job % PALETTE.len()],
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            rx + rw / 2.0,
            y + rh / 2.0 + 4.0,
            escape(&job.id)
        );
    }
    if let Some(trace) = &schedule.meta.pack {
        let bottom = TOP + machines as f64 * (BAND + GAP) - GAP;
        for it in &trace.iterations {
            for t in it.interval {
                if t <= horizon {
                    let _ = writeln!(
                        svg,
                        r##"<line class="iteration" x1="{0:.2}" y1="{TOP:.2}" x2="{0:.2}" y2="{bottom:.2}" stroke="#c00" stroke-dasharray="4 3"/>"##,
                        x(t)
                    );
                }
            }
        }
    }
    let axis_y = TOP + machines as f64 * (BAND + GAP);
    let step = (horizon / 10.0).ceil().max(1.0);
    let mut t = 0.0;
    while t <= horizon + 1e-9 {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{axis_y:.2}" text-anchor="middle">{t}</text>"#, x(t));
        t += step;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
