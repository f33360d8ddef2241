use std::fmt::Write;

use super::{Floorplan, OpeningKind, RoomKind};

fn room_color(kind: RoomKind) -> &'static str {
    match kind {
        RoomKind::LivingRoom => "#f4d58d",
        RoomKind::Kitchen => "#f2a65a",
        RoomKind::Bedroom => "#a3c4f3",
        RoomKind::Bathroom => "#90dbf4",
        RoomKind::Closet => "#cfbaf0",
        RoomKind::Balcony => "#b9fbc0",
        RoomKind::Corridor => "#e0e0e0",
        RoomKind::DiningRoom => "#ffcfd2",
    }
}

fn opening_color(kind: OpeningKind) -> &'static str {
    match kind {
        OpeningKind::Door => "#8b4513",
        OpeningKind::Window => "#1e90ff",
    }
}

/// Renders the plan as a standalone SVG document on a `resolution`-sized
/// canvas. The output depends only on the plan, byte for byte.
pub fn render_svg(plan: &Floorplan) -> String {
    let r = plan.resolution;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{r}" height="{r}" viewBox="0 0 {r} {r}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{r}" height="{r}" fill="#ffffff"/>"##
    );

    for room in &plan.rooms {
        let pts: Vec<String> = room
            .boundary
            .iter()
            .map(|p| format!("{},{}", p.x, p.y))
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{}" stroke="none"/>"#,
            pts.join(" "),
            room_color(room.kind)
        );
    }

    for (i, w) in plan.walls.iter().enumerate() {
        let Some((a, b)) = plan.wall_segment(i) else {
            continue;
        };
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#202020" stroke-width="{}" stroke-linecap="square"/>"##,
            a.x, a.y, b.x, b.y, w.thickness
        );
    }

    // Openings: a white gap over the wall, bounded by two parallel strokes.
    for o in &plan.openings {
        let [a, b] = o.endpoints;
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        let (nx, ny) = (-dy / len, dx / len);
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#ffffff" stroke-width="3"/>"##,
            a.x, a.y, b.x, b.y
        );
        for side in [-1.0, 1.0] {
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="0.75"/>"#,
                a.x + side * nx,
                a.y + side * ny,
                b.x + side * nx,
                b.y + side * ny,
                opening_color(o.kind)
            );
        }
    }

    for icon in &plan.icons {
        let rc = icon.rect;
        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#fafafa" stroke="#404040" stroke-width="0.75"/>"##,
            rc.xmin,
            rc.ymin,
            rc.width(),
            rc.height()
        );
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" font-size="5" font-family="sans-serif" text-anchor="middle" dominant-baseline="middle" fill="#404040">{}</text>"##,
            0.5 * (rc.xmin + rc.xmax),
            0.5 * (rc.ymin + rc.ymax),
            icon.kind
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::model::{Icon, IconKind, Room};

    #[test]
    fn empty_plan_has_only_canvas() {
        let svg = render_svg(&Floorplan::empty());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 256 256""#));
        assert_eq!(svg.matches("<rect").count(), 1);
        assert_eq!(svg.lines().count(), 3);
    }

    #[test]
    fn one_room_one_polygon() {
        let mut p = Floorplan::empty();
        p.rooms.push(Room {
            kind: RoomKind::Bedroom,
            boundary: Rect::new(10.0, 10.0, 50.0, 50.0).to_polygon(),
        });
        let svg = render_svg(&p);
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.contains(room_color(RoomKind::Bedroom)));
    }

    #[test]
    fn bed_icon_gets_rect_and_label() {
        let mut p = Floorplan::empty();
        p.icons.push(Icon {
            kind: IconKind::Bed,
            rect: Rect::new(20.0, 20.0, 60.0, 80.0),
        });
        let svg = render_svg(&p);
        assert_eq!(svg.matches("<rect").count(), 2);
        assert!(svg.contains(">bed</text>"));
        assert_eq!(svg, render_svg(&p.clone()));
    }
}
