"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately scalar Python over nested lists: no shared
code with the package, so the vectorized implementations can be checked
against a second, independently written route.
"""

import math


def bilinear_oracle(values, x, y):
    """Directly evaluate the continuous signal defined by an H x W x C grid.

    Cell (r, c) is a sample at ((c + 0.5) / W, (r + 0.5) / H); queries clamp
    to the center lattice (constant extrapolation at the boundary).
    """
    h = len(values)
    w = len(values[0])
    nch = len(values[0][0])
    gx = min(max(x * w - 0.5, 0.0), w - 1.0)
    gy = min(max(y * h - 0.5, 0.0), h - 1.0)
    c0 = min(int(math.floor(gx)), w - 1)
    r0 = min(int(math.floor(gy)), h - 1)
    c1 = min(c0 + 1, w - 1)
    r1 = min(r0 + 1, h - 1)
    fx = gx - c0
    fy = gy - r0
    out = []
    for k in range(nch):
        top = (1.0 - fx) * float(values[r0][c0][k]) + fx * float(values[r0][c1][k])
        bot = (1.0 - fx) * float(values[r1][c0][k]) + fx * float(values[r1][c1][k])
        out.append((1.0 - fy) * top + fy * bot)
    return out


def nn_scan_oracle(values, target):
    """Exhaustive scan for the cell whose vector is L2-closest to target.

    Returns ((row, col), distance); ties keep the first cell in row-major
    order. Accumulates channel by channel in float64, in channel order.
    """
    h = len(values)
    w = len(values[0])
    nch = len(values[0][0])
    best = None
    best_d2 = math.inf
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for k in range(nch):
                diff = float(values[r][c][k]) - float(target[k])
                acc += diff * diff
            if acc < best_d2:
                best_d2 = acc
                best = (r, c)
    return best, math.sqrt(best_d2)


def extreme_box_oracle(points):
    """Coordinate-wise min/max envelope of a point set."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def iou_oracle(a, b):
    """IoU of two (x_min, y_min, x_max, y_max) boxes; 0 when the union is empty."""
    iw = min(a[2], b[2]) - max(a[0], b[0])
    ih = min(a[3], b[3]) - max(a[1], b[1])
    inter = max(iw, 0.0) * max(ih, 0.0)
    area_a = (a[2] - a[0]) * (a[3] - a[1])
    area_b = (b[2] - b[0]) * (b[3] - b[1])
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def sparkline_oracle(points, areas):
    """Per-pair recomputation of frame-to-frame location and area deltas."""
    loc = [0.0]
    area = [0.0]
    for i in range(1, len(points)):
        dx = points[i][0] - points[i - 1][0]
        dy = points[i][1] - points[i - 1][1]
        loc.append(math.sqrt(dx * dx + dy * dy))
        area.append(abs(areas[i] - areas[i - 1]))
    return loc, area


def max_shift_oracle(location_delta, annotated):
    """Brute-force scan for the unannotated frame with the largest shift.

    Ties resolve to the smallest frame index; returns None when every frame
    is annotated.
    """
    best = None
    best_delta = -math.inf
    for frame, delta in enumerate(location_delta):
        if frame in annotated:
            continue
        if delta > best_delta:
            best = frame
            best_delta = delta
    return best


def waypoint_path_oracle(waypoints, frame_count):
    """Re-derive the per-frame (row, col) cells of a piecewise-linear path.

    waypoints: sorted (frame, row, col) triples covering [0, frame_count).
    Positions between waypoints interpolate linearly and round to the
    nearest cell.
    """
    cells = []
    seg = 0
    for frame in range(frame_count):
        while seg + 1 < len(waypoints) - 1 and frame >= waypoints[seg + 1][0]:
            seg += 1
        f0, r0, c0 = waypoints[seg]
        f1, r1, c1 = waypoints[seg + 1]
        if frame <= f0:
            s = 0.0
        elif frame >= f1:
            s = 1.0
        else:
            s = (frame - f0) / (f1 - f0)
        cells.append((round(r0 + s * (r1 - r0)), round(c0 + s * (c1 - c0))))
    return cells
