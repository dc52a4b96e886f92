#include "henon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stack>

namespace henon {

PreimageCurve threshold_preimage_line(const MapParameters& mp, const Threshold& thr,
                                      int samples, double extent_min, double extent_max) {
    if (samples < 2) throw ConfigError("preimage line needs at least 2 samples");
    PreimageCurve curve;
    curve.depth = 1;
    curve.points.reserve(static_cast<std::size_t>(samples));
    const double x = thr.theta / mp.b;
    for (int i = 0; i < samples; ++i) {
        const double t = extent_min + (extent_max - extent_min) * i / (samples - 1);
        curve.points.push_back({x, t});
    }
    return curve;
}

namespace {

// Point of the depth-k curve at seed-line parameter t.
StatePoint curve_point(double t, int depth, const MapParameters& mp, const Threshold& thr) {
    return iterate_inverse({thr.theta / mp.b, t}, depth - 1, mp);
}

double segment_length(const StatePoint& a, const StatePoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

bool box_overlaps_segment(const Box& box, const StatePoint& a, const StatePoint& b) {
    const double lo_x = std::min(a.x, b.x), hi_x = std::max(a.x, b.x);
    const double lo_y = std::min(a.y, b.y), hi_y = std::max(a.y, b.y);
    return hi_x >= box.x_min && lo_x <= box.x_max && hi_y >= box.y_min && lo_y <= box.y_max;
}

PreimageCurve trace_curve(int depth, const MapParameters& mp, const Threshold& thr,
                          const CurveTraceOptions& opt) {
    PreimageCurve curve;
    curve.depth = depth;

    const double span = opt.extent_max - opt.extent_min;
    const double min_param_step = span * 0x1.0p-36;

    struct Segment {
        double t0, t1;
        StatePoint p0, p1;
    };

    std::size_t evaluations = 0;
    auto eval = [&](double t) {
        ++evaluations;
        return curve_point(t, depth, mp, thr);
    };

    // In-order traversal: emit p0 of each final segment, splitting while the
    // image of a parameter interval stays near the viewport and too long.
    std::stack<Segment> work;
    const int n0 = std::max(2, opt.samples_per_curve);
    for (int i = n0 - 1; i >= 1; --i) {
        const double t0 = opt.extent_min + span * (i - 1) / (n0 - 1);
        const double t1 = opt.extent_min + span * i / (n0 - 1);
        work.push({t0, t1, eval(t0), eval(t1)});
    }

    auto emit = [&](const StatePoint& p) {
        if (opt.viewport.contains(p)) curve.points.push_back(p);
    };

    while (!work.empty()) {
        Segment s = work.top();
        work.pop();
        const bool refinable = is_finite(s.p0) && is_finite(s.p1) &&
                               box_overlaps_segment(opt.viewport, s.p0, s.p1) &&
                               segment_length(s.p0, s.p1) > opt.max_segment_length &&
                               (s.t1 - s.t0) > min_param_step;
        if (refinable && evaluations < opt.max_points_per_curve) {
            const double tm = 0.5 * (s.t0 + s.t1);
            const StatePoint pm = eval(tm);
            work.push({tm, s.t1, pm, s.p1});
            work.push({s.t0, tm, s.p0, pm});
            continue;
        }
        if (refinable) curve.truncated = true;  // budget exhausted mid-split
        emit(s.p0);
        if (work.empty()) emit(s.p1);  // right boundary of the whole sweep
    }
    return curve;
}

}  // namespace

std::vector<PreimageCurve> preimage_curves(int max_depth, const MapParameters& mp,
                                           const Threshold& thr, const CurveTraceOptions& opt) {
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    std::vector<PreimageCurve> curves;
    curves.reserve(static_cast<std::size_t>(max_depth));
    for (int depth = 1; depth <= max_depth; ++depth) {
        curves.push_back(trace_curve(depth, mp, thr, opt));
    }
    return curves;
}

void serial::label_points(std::span<const StatePoint> points, int horizon, const Threshold& thr,
                          const MapParameters& mp, std::span<std::uint8_t> labels_out) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        labels_out[i] = oracle_label(points[i], horizon, thr, mp) ? 1 : 0;
    }
}

void label_points(std::span<const StatePoint> points, int horizon, const Threshold& thr,
                  const MapParameters& mp, std::span<std::uint8_t> labels_out) {
    const std::int64_t n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        labels_out[i] = oracle_label(points[i], horizon, thr, mp) ? 1 : 0;
    }
}

ClassMap class_map(int horizon, std::size_t n_points, const MapParameters& mp,
                   const Threshold& thr, std::uint64_t seed) {
    if (n_points < 1) throw ConfigError("class map needs at least one point");
    std::mt19937_64 rng(derive_seed(seed, SeedPurpose::orbit));
    Orbit orbit = generate_attractor_orbit(rng, n_points, kDefaultBurnIn, mp);

    ClassMap map;
    map.horizon = horizon;
    map.points = std::move(orbit.points);
    map.labels.resize(map.points.size());
    label_points(map.points, horizon, thr, mp, map.labels);
    return map;
}

namespace {

double nearest_opposite_one(const StatePoint& q, std::uint8_t q_label,
                            std::span<const StatePoint> ref_points,
                            std::span<const std::uint8_t> ref_labels) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ref_points.size(); ++j) {
        if (ref_labels[j] == q_label) continue;
        const double dx = q.x - ref_points[j].x;
        const double dy = q.y - ref_points[j].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) best = d2;
    }
    return std::sqrt(best);
}

}  // namespace

std::vector<double> serial::nearest_opposite_distances(std::span<const StatePoint> query_points,
                                                       std::span<const std::uint8_t> query_labels,
                                                       std::span<const StatePoint> ref_points,
                                                       std::span<const std::uint8_t> ref_labels) {
    std::vector<double> out(query_points.size());
    for (std::size_t i = 0; i < query_points.size(); ++i) {
        out[i] = nearest_opposite_one(query_points[i], query_labels[i], ref_points, ref_labels);
    }
    return out;
}

std::vector<double> nearest_opposite_distances(std::span<const StatePoint> query_points,
                                               std::span<const std::uint8_t> query_labels,
                                               std::span<const StatePoint> ref_points,
                                               std::span<const std::uint8_t> ref_labels) {
    std::vector<double> out(query_points.size());
    const std::int64_t n = static_cast<std::int64_t>(query_points.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i] = nearest_opposite_one(query_points[i], query_labels[i], ref_points, ref_labels);
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw ConfigError("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_classmap_csv(const std::string& path, const ClassMap& map) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << "x,y,label\n";
    out.precision(17);
    for (std::size_t i = 0; i < map.points.size(); ++i) {
        out << map.points[i].x << ',' << map.points[i].y << ',' << int(map.labels[i]) << '\n';
    }
}

void write_curves_csv(const std::string& path, const std::vector<PreimageCurve>& curves) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << "x,y,depth\n";
    out.precision(17);
    for (const auto& curve : curves) {
        for (const auto& p : curve.points) {
            out << p.x << ',' << p.y << ',' << curve.depth << '\n';
        }
    }
}

}  // namespace henon
