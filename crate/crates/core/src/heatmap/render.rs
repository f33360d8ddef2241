use super::*;
use crate::geometry::{point_in_polygon, Point};
use crate::model::{validate, Floorplan};
use crate::raster::{disk_pixels, strip_pixels};

fn paint_disk(stack: &mut HeatmapStack, k: usize, centre: Point) {
    let res = stack.resolution();
    let plane = stack.plane_mut(k);
    for (r, c) in disk_pixels(centre, DISK_RADIUS, res) {
        plane[r * res + c] = 1.0;
    }
}

fn set_label(stack: &mut HeatmapStack, group: Range<usize>, label: usize, r: usize, c: usize) {
    for k in group {
        stack.set(k, r, c, if k == label { 1.0 } else { 0.0 });
    }
}

/// Rasterizes a plan into the ground-truth stack: radius-11 disks of 1.0 in
/// each primitive's geometry channel and one-hot semantics (rooms in file
/// order, then walls 3 px wide; icons in file order).
pub fn render_ground_truth(plan: &Floorplan) -> Result<HeatmapStack, HeatmapError> {
    let violations = validate(plan);
    if !violations.is_empty() {
        return Err(HeatmapError::InvalidPlan(violations));
    }
    let res = plan.resolution as usize;
    let mut s = blank_stack(res);

    for c in &plan.corners {
        paint_disk(&mut s, junction_channel(c.junction), c.position);
    }
    for o in &plan.openings {
        let [a, b] = o.endpoints;
        if let Some(d) = Direction::of_vector(b.x - a.x, b.y - a.y) {
            paint_disk(&mut s, opening_channel(d), a);
            paint_disk(&mut s, opening_channel(d.opposite()), b);
        }
    }
    for icon in &plan.icons {
        for (i, p) in icon.rect.corners().into_iter().enumerate() {
            paint_disk(&mut s, icon_corner_channel(i), p);
        }
    }

    for room in &plan.rooms {
        let label = room_channel(room.kind);
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in &room.boundary {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        let max = res as f64 - 1.0;
        for r in y0.ceil().max(0.0) as usize..=y1.floor().min(max) as usize {
            for c in x0.ceil().max(0.0) as usize..=x1.floor().min(max) as usize {
                if point_in_polygon(Point::new(c as f64, r as f64), &room.boundary) {
                    set_label(&mut s, ROOM_SEMANTICS, label, r, c);
                }
            }
        }
    }
    for (a, b) in plan.wall_segments() {
        for (r, c) in strip_pixels(a, b, WALL_RASTER_WIDTH, res) {
            set_label(&mut s, ROOM_SEMANTICS, WALL, r, c);
        }
    }
    for icon in &plan.icons {
        let label = icon_channel(icon.kind);
        let rc = icon.rect;
        let max = res as f64 - 1.0;
        for r in rc.ymin.ceil().max(0.0) as usize..=rc.ymax.floor().min(max) as usize {
            for c in rc.xmin.ceil().max(0.0) as usize..=rc.xmax.floor().min(max) as usize {
                set_label(&mut s, ICON_SEMANTICS, label, r, c);
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::model::{Corner, Icon, Room};

    #[test]
    fn empty_plan() {
        let s = render_ground_truth(&Floorplan::empty()).unwrap();
        assert_eq!(s, blank_stack(256));
    }

    #[test]
    fn invalid_plan_rejected() {
        let mut p = Floorplan::empty();
        p.corners.push(Corner {
            id: 0,
            position: Point::new(5.0, 5.0),
            junction: "L_0".parse().unwrap(),
        });
        assert!(matches!(
            render_ground_truth(&p),
            Err(HeatmapError::InvalidPlan(_))
        ));
    }

    #[test]
    fn room_and_icon_one_hot() {
        let mut p = Floorplan::empty();
        p.rooms.push(Room {
            kind: RoomKind::Bedroom,
            boundary: Rect::new(10.0, 10.0, 50.0, 50.0).to_polygon(),
        });
        p.icons.push(Icon {
            kind: IconKind::Toilet,
            rect: Rect::new(20.0, 20.0, 30.0, 26.0),
        });
        let s = render_ground_truth(&p).unwrap();
        let bed = room_channel(RoomKind::Bedroom);
        assert_eq!(s.plane(bed).iter().filter(|&&v| v == 1.0).count(), 41 * 41);
        assert_eq!(s.get(bed, 10, 10), 1.0);
        assert_eq!(s.get(ROOM_BACKGROUND, 10, 10), 0.0);
        let toilet = icon_channel(IconKind::Toilet);
        assert_eq!(s.plane(toilet).iter().filter(|&&v| v == 1.0).count(), 11 * 7);
        assert_eq!(s.get(icon_corner_channel(0), 20, 20), 1.0);
        assert_eq!(s.get(icon_corner_channel(2), 26, 30), 1.0);
        assert_eq!(check_stack(&s), Ok(()));
    }
}
