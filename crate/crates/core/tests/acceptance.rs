//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use floorplan_core::evaluate::{
    eval_corners, eval_icons, eval_openings, eval_relationships, eval_rooms, match_rooms,
    wall_line_distance, PrecisionRecall,
};
use floorplan_core::features::{pool_points_to_grid, unpool_grid_to_points, FeatureGrid};
use floorplan_core::geometry::{polygon_iou, signed_area, Point, Rect};
use floorplan_core::heatmap::{render_ground_truth, sigmoid_ce, softmax_ce};
use floorplan_core::model::{
    Corner, Floorplan, Icon, IconKind, Opening, OpeningKind, Room, RoomKind, Wall,
};
use floorplan_core::pointcloud::{compute_domain, Features, FloorplanDomain, PointCloud};
use floorplan_core::raster::ChannelStack;
use floorplan_core::reconstruct::{reconstruct_floorplan, solve_ip, IpModel, Sense};
use floorplan_core::synth::{corrupt_heatmaps, gen_floorplan, NoiseConfig, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROUND_TRIP_SEEDS: u64 = 50;
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(60);
const ROOM_IOU_FLOOR: f64 = 0.95;
const ADJOINT_TOL: f64 = 1e-6;
const LOSS_TOL: f64 = 1e-9;
const LINE_TOL: f64 = 1e-6;
const CALIBRATION_SEEDS: u64 = 1000;
const NOISE_GOLDEN_RECALL: f64 = 0.4666666666666667;
const NOISE_TOL: f64 = 0.02;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn clean_round_trip() -> Outcome {
    let start = Instant::now();
    let mut worst_iou = f64::INFINITY;
    let mut failures = Vec::new();
    for seed in 0..ROUND_TRIP_SEEDS {
        let gt = gen_floorplan(&SynthConfig::default().with_seed(seed)).map_err(|e| e.to_string())?;
        let stack = render_ground_truth(&gt).map_err(|e| e.to_string())?;
        let pred = match reconstruct_floorplan(&stack) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let c = eval_corners(&pred.corner_positions(), &gt.corner_positions());
        if c.precision != 1.0 || c.recall != 1.0 {
            failures.push(format!("seed {seed}: corners {:.3}/{:.3}", c.precision, c.recall));
        }
        let pairs = match_rooms(&pred, &gt, 0.0);
        if pairs.len() != gt.rooms.len() {
            failures.push(format!("seed {seed}: {} of {} rooms matched", pairs.len(), gt.rooms.len()));
        }
        for (p, g) in pairs {
            let iou = polygon_iou(&pred.rooms[p].boundary, &gt.rooms[g].boundary);
            worst_iou = worst_iou.min(iou);
            if iou <= ROOM_IOU_FLOOR {
                failures.push(format!("seed {seed}: room {g} IOU {iou:.3}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "{ROUND_TRIP_SEEDS} seeds in {:.1}s, worst room IOU {worst_iou:.4}{}",
        elapsed.as_secs_f64(),
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    check(failures.is_empty() && elapsed < ROUND_TRIP_BUDGET, detail)
}

fn adjointness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let res = rng.random_range(4..=64);
        let channels = rng.random_range(1..=4);
        let n = rng.random_range(1..=500);
        let domain = FloorplanDomain {
            origin: [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)],
            scale: rng.random_range(0.01..0.2),
            resolution: res,
        };
        let span = domain.scale * res as f64;
        // a margin outside the square exercises dropped points
        let positions: Vec<[f64; 3]> = (0..n)
            .map(|_| {
                [
                    domain.origin[0] + rng.random_range(-0.1..1.1) * span,
                    domain.origin[1] + rng.random_range(-0.1..1.1) * span,
                    rng.random_range(0.0..3.0),
                ]
            })
            .collect();
        let f: Vec<f64> = (0..n * channels).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..(res * res) as usize * channels)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let f = Features::new(channels, f).map_err(|e| e.to_string())?;
        let bare = PointCloud::new(positions);
        let with_f = bare.clone().with_features(f.clone()).map_err(|e| e.to_string())?;
        let g = FeatureGrid::from_vec(res as usize, channels, g);

        let pooled = pool_points_to_grid(&with_f, &domain, res).map_err(|e| e.to_string())?;
        let lhs = pooled.dot(&g);
        let unpooled = unpool_grid_to_points(&g, &bare, &domain).map_err(|e| e.to_string())?;
        let rhs = f.dot(&unpooled);
        let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
        worst = worst.max(rel);
    }
    check(worst < ADJOINT_TOL, format!("100 pairs, worst relative gap {worst:.3e}"))
}

fn brute_force(m: &IpModel) -> Option<f64> {
    let n = m.len();
    let mut best: Option<f64> = None;
    let mut x = vec![false; n];
    for mask in 0u32..(1 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = mask >> i & 1 == 1;
        }
        if m.is_feasible(&x) {
            let v = m.value(&x);
            if best.is_none_or(|b| v > b) {
                best = Some(v);
            }
        }
    }
    best
}

fn random_model(rng: &mut ChaCha8Rng) -> IpModel {
    let n = rng.random_range(1..=20);
    let objective = (0..n).map(|_| rng.random_range(-64i32..=64) as f64 / 64.0).collect();
    let mut m = IpModel::new(objective);
    for _ in 0..rng.random_range(0..=n + 4) {
        let k = rng.random_range(1..=n.min(5));
        let mut terms = Vec::new();
        for _ in 0..k {
            let v = rng.random_range(0..n);
            if terms.iter().all(|&(u, _)| u != v) {
                terms.push((v, rng.random_range(-2i64..=2)));
            }
        }
        let sense = if rng.random_bool(0.1) { Sense::Eq } else { Sense::Le };
        let rhs = rng.random_range(0i64..=2);
        m.add(terms, sense, rhs);
    }
    m
}

fn solver_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut infeasible = 0;
    for i in 0..200 {
        let m = random_model(&mut rng);
        let want = brute_force(&m);
        let got = solve_ip(&m);
        match (want, got) {
            (None, Err(_)) => infeasible += 1,
            (Some(w), Ok(s)) if s.objective == w && m.is_feasible(&s.assignment) && s.certified => {}
            (w, g) => return Err(format!("instance {i}: brute force {w:?}, solver {g:?}")),
        }
    }
    Ok(format!("200 models agree exactly ({infeasible} infeasible)"))
}

fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
    let poly = vec![pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)];
    if signed_area(&poly) > 0.0 {
        poly
    } else {
        poly.into_iter().rev().collect()
    }
}

fn room(kind: RoomKind, x0: f64, y0: f64, x1: f64, y1: f64) -> Room {
    Room {
        kind,
        boundary: rect(x0, y0, x1, y1),
    }
}

fn door(a: Point, b: Point) -> Opening {
    Opening {
        kind: OpeningKind::Door,
        endpoints: [a, b],
        host_wall: 0,
    }
}

fn with_rooms(rooms: Vec<Room>, openings: Vec<Opening>) -> Floorplan {
    Floorplan {
        rooms,
        openings,
        ..Floorplan::empty()
    }
}

/// Rooms A–D left to right, each 50 px wide, doors on the three shared walls.
fn path_plan(kinds: [RoomKind; 4]) -> Floorplan {
    let rooms = (0..4)
        .map(|i| room(kinds[i], 50.0 * i as f64, 0.0, 50.0 * (i + 1) as f64, 50.0))
        .collect();
    let doors = (1..4)
        .map(|i| door(pt(50.0 * i as f64, 20.0), pt(50.0 * i as f64, 30.0)))
        .collect();
    with_rooms(rooms, doors)
}

fn pr(p: &PrecisionRecall) -> (f64, f64) {
    (p.precision, p.recall)
}

fn metric_cases() -> Outcome {
    let gt_corners = [pt(0.0, 0.0), pt(100.0, 0.0), pt(0.0, 100.0)];
    let shifted: Vec<Point> = gt_corners.iter().map(|p| pt(p.x + 15.0, p.y)).collect();
    let partial = [pt(3.0, 4.0), pt(103.0, 0.0), pt(200.0, 200.0)];

    let icon = |x: f64, y: f64| Icon {
        kind: IconKind::Bed,
        rect: Rect::from_corners(pt(x, y), pt(x + 4.0, y + 4.0)),
    };
    let icon_gt = Floorplan {
        icons: vec![icon(10.0, 10.0)],
        ..Floorplan::empty()
    };
    let icon_pred = Floorplan {
        icons: vec![icon(11.0, 11.0)],
        ..Floorplan::empty()
    };
    let icon_iou = icon_pred.icons[0].rect.iou(&icon_gt.icons[0].rect);

    let full = room(RoomKind::Bedroom, 0.0, 0.0, 100.0, 100.0);
    let shrunk = room(RoomKind::Bedroom, 0.0, 0.0, 60.0, 100.0);

    use RoomKind::*;
    let path_gt = path_plan([LivingRoom, Kitchen, Bedroom, Bathroom]);
    let path_pred = path_plan([LivingRoom, Closet, Bedroom, Bathroom]);

    let pair_gt = with_rooms(
        vec![room(Kitchen, 0.0, 0.0, 50.0, 50.0), room(Bedroom, 50.0, 0.0, 100.0, 50.0)],
        vec![door(pt(50.0, 20.0), pt(50.0, 30.0))],
    );
    let pair_pred = with_rooms(pair_gt.rooms.clone(), vec![]);
    let door_moved = with_rooms(pair_gt.rooms.clone(), vec![door(pt(50.0, 29.0), pt(50.0, 39.0))]);

    let cases: [(&str, f64, f64); 10] = [
        ("identical corners", pr(&eval_corners(&gt_corners, &gt_corners)).0 + pr(&eval_corners(&gt_corners, &gt_corners)).1, 2.0),
        ("corners shifted 15 px", {
            let e = eval_corners(&shifted, &gt_corners);
            e.precision + e.recall
        }, 0.0),
        ("two of three corners", {
            let e = eval_corners(&partial, &gt_corners);
            if e.precision != e.recall {
                return Err(format!("corner precision {} != recall {}", e.precision, e.recall));
            }
            e.recall
        }, 2.0 / 3.0),
        ("identical plan mid level", {
            let (o, i, r) = (eval_openings(&path_gt, &path_gt), eval_icons(&icon_gt, &icon_gt), eval_rooms(&path_gt, &path_gt));
            o.precision * o.recall * i.precision * i.recall * r.precision * r.recall
        }, 1.0),
        ("room at 60% area", {
            let e = eval_rooms(&with_rooms(vec![shrunk], vec![]), &with_rooms(vec![full], vec![]));
            e.precision + e.recall
        }, 0.0),
        ("icon IOU 9/23", {
            let e = eval_icons(&icon_pred, &icon_gt);
            if icon_iou.to_bits() != (9.0f64 / 23.0).to_bits() {
                return Err(format!("icon IOU {icon_iou} is not 9/23"));
            }
            e.precision + e.recall
        }, 0.0),
        ("identical relationships", eval_relationships(&path_gt, &path_gt), 1.0),
        ("path with B mistyped", eval_relationships(&path_pred, &path_gt), 0.25),
        ("door missing", eval_relationships(&pair_pred, &pair_gt), 0.0),
        ("door slid 9 px", {
            let e = eval_openings(&door_moved, &pair_gt);
            e.precision + e.recall
        }, 2.0),
    ];
    let bad: Vec<String> = cases
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(name, got, want)| format!("{name}: {got} != {want}"))
        .collect();
    check(bad.is_empty(), if bad.is_empty() { "10 hand cases exact".into() } else { bad.join("; ") })
}

/// Scalar restatement of the domain construction.
fn domain_oracle(points: &[[f64; 3]]) -> ([f64; 2], f64) {
    let mut bounds = [[0.0; 2]; 2];
    for axis in 0..2 {
        let mut v: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = v.len() as f64;
        let lo_rank = ((0.025 * n).ceil() as usize).max(1);
        let hi_rank = ((0.975 * n).ceil() as usize).max(1);
        let (lo, hi) = (v[lo_rank - 1], v[hi_rank - 1]);
        let pad = 0.05 * (hi - lo);
        bounds[axis] = [lo - pad, hi + pad];
    }
    let side = f64::max(bounds[0][1] - bounds[0][0], bounds[1][1] - bounds[1][0]);
    let scale = side / 256.0;
    let origin = [
        0.5 * (bounds[0][0] + bounds[0][1]) - side / 2.0,
        0.5 * (bounds[1][0] + bounds[1][1]) - side / 2.0,
    ];
    (origin, scale)
}

fn ulps(a: f64, b: f64) -> u64 {
    let key = |v: f64| {
        let bits = v.to_bits() as i64;
        if bits < 0 { i64::MIN - bits } else { bits }
    };
    key(a).abs_diff(key(b))
}

fn domain_construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0;
    for i in 0..20 {
        let n = rng.random_range(40..=3000);
        let (w, h) = (rng.random_range(1.0..30.0), rng.random_range(1.0..30.0));
        let (ox, oy) = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let mut pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [ox + rng.random_range(0.0..w), oy + rng.random_range(0.0..h), rng.random_range(0.0..3.0)])
            .collect();
        if i % 2 == 0 {
            pts[0][0] = 1000.0;
        }
        let d = compute_domain(&PointCloud::new(pts.clone())).map_err(|e| e.to_string())?;
        let (origin, scale) = domain_oracle(&pts);
        worst = worst
            .max(ulps(d.scale, scale))
            .max(ulps(d.origin[0], origin[0]))
            .max(ulps(d.origin[1], origin[1]));
    }
    check(worst <= 1, format!("20 clouds, worst deviation {worst} ulp"))
}

fn loss_constants() -> Outcome {
    let zeros = ChannelStack::zeros(16, (0..4).map(|i| format!("c{i}")).collect());
    let s = sigmoid_ce(&zeros, &zeros).map_err(|e| e.to_string())?;
    let classes = ChannelStack::zeros(16, (0..10).map(|i| format!("g{i}")).collect());
    let labels: Vec<usize> = (0..256).map(|i| i % 10).collect();
    let m = softmax_ce(&classes, &labels).map_err(|e| e.to_string())?;
    let (ds, dm) = ((s - 2f64.ln()).abs(), (m - 10f64.ln()).abs());
    check(
        ds <= LOSS_TOL && dm <= LOSS_TOL,
        format!("sigmoid {s:.12} (ln 2 {:+.1e}), softmax {m:.12} (ln 10 {:+.1e})", s - 2f64.ln(), m - 10f64.ln()),
    )
}

fn synth_calibration() -> Outcome {
    let (mut rooms, mut icons, mut openings) = (0usize, 0usize, 0usize);
    for seed in 0..CALIBRATION_SEEDS {
        let p = gen_floorplan(&SynthConfig::default().with_seed(seed)).map_err(|e| e.to_string())?;
        rooms += p.rooms.len();
        icons += p.icons.len();
        openings += p.openings.len();
    }
    let n = CALIBRATION_SEEDS as f64;
    let (r, i, o) = (rooms as f64 / n, icons as f64 / n, openings as f64 / n);
    check(
        (r - 5.2).abs() <= 0.5 && (i - 9.1).abs() <= 1.0 && (o - 9.9).abs() <= 1.0,
        format!("means rooms {r:.3}, icons {i:.3}, openings {o:.3}"),
    )
}

fn noise_regression() -> Outcome {
    let noise = NoiseConfig {
        heatmap_sigma: 0.1,
        dropout_prob: 0.1,
        jitter_px: 3.0,
    };
    let (mut matched, mut total) = (0, 0);
    for seed in 0..50 {
        let gt = gen_floorplan(&SynthConfig::default().with_seed(seed)).map_err(|e| e.to_string())?;
        let stack = corrupt_heatmaps(&render_ground_truth(&gt).map_err(|e| e.to_string())?, &noise, seed);
        let pred = reconstruct_floorplan(&stack).unwrap_or_else(|_| Floorplan::empty());
        let e = eval_corners(&pred.corner_positions(), &gt.corner_positions());
        matched += e.matches;
        total += e.ground_truth;
    }
    let recall = matched as f64 / total as f64;
    check(
        (recall - NOISE_GOLDEN_RECALL).abs() <= NOISE_TOL,
        format!("pooled corner recall {recall:.4} ({matched}/{total}), golden {NOISE_GOLDEN_RECALL:.4}"),
    )
}

fn single_wall(y: f64) -> Floorplan {
    let corner = |id, x| Corner {
        id,
        position: pt(x, y),
        junction: if x == 0.0 { "I_0" } else { "I_180" }.parse().unwrap(),
    };
    Floorplan {
        corners: vec![corner(0, 0.0), corner(1, 100.0)],
        walls: vec![Wall::new(0, 1)],
        ..Floorplan::empty()
    }
}

fn line_distance() -> Outcome {
    let gt = gen_floorplan(&SynthConfig::default().with_seed(0)).map_err(|e| e.to_string())?;
    let same = wall_line_distance(&gt, &gt).map_err(|e| e.to_string())?;
    let offset = wall_line_distance(&single_wall(0.0), &single_wall(3.0)).map_err(|e| e.to_string())?;
    check(
        same == 0.0 && (offset - 3.0).abs() <= LINE_TOL,
        format!("identical {same}, 3 px offset {offset:.9}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("clean round trip", clean_round_trip),
        ("pool/unpool adjointness", adjointness),
        ("solver exactness", solver_exactness),
        ("metric oracle equivalence", metric_cases),
        ("domain construction", domain_construction),
        ("loss constants", loss_constants),
        ("synth calibration", synth_calibration),
        ("noise regression", noise_regression),
        ("line-distance sanity", line_distance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
