#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "henon/dynamics.hpp"

namespace henon {

struct Threshold {
    double theta = 0.3;  // criterion is y >= theta, boundary included
};

// Exact exceedance oracle: iterate exactly `horizon` steps forward and test the
// final y against the threshold. Intermediate crossings are ignored on purpose.
inline bool oracle_label(StatePoint p, int horizon, const Threshold& thr, const MapParameters& mp) {
    for (int i = 0; i < horizon; ++i) p = map_forward(p, mp);
    return p.y >= thr.theta;
}

struct PreimageCurve {
    int depth = 1;                  // forward iterations needed to land on y = theta
    std::vector<StatePoint> points; // polyline, ordered by the seed-line parameter
    bool truncated = false;         // refinement budget ran out before meeting the segment cap
};

struct Box {
    double x_min = -1.6, x_max = 1.6;
    double y_min = -0.5, y_max = 0.5;

    bool contains(const StatePoint& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
};

struct CurveTraceOptions {
    int samples_per_curve = 1024;      // initial uniform parameter samples
    double max_segment_length = 0.02;  // refine image segments longer than this
    std::size_t max_points_per_curve = 400000;
    double extent_min = -0.45;         // seed-line parameter range (attractor y-extent)
    double extent_max = 0.45;
    Box viewport;                      // returned points are restricted to this box
};

// Depth-1 preimage of the threshold line: the vertical line x = theta/b.
PreimageCurve threshold_preimage_line(const MapParameters& mp, const Threshold& thr,
                                      int samples = 1024,
                                      double extent_min = -0.45, double extent_max = 0.45);

// Depth-k curves for k = 1..max_depth. Depth-k points are inverse^(k-1) images
// of points on the depth-1 line, adaptively refined where the image stretches.
std::vector<PreimageCurve> preimage_curves(int max_depth, const MapParameters& mp,
                                           const Threshold& thr,
                                           const CurveTraceOptions& options = {});

struct ClassMap {
    int horizon = 1;
    std::vector<StatePoint> points;
    std::vector<std::uint8_t> labels;
};

// n_points attractor samples (one orbit) labeled by the oracle at `horizon`.
ClassMap class_map(int horizon, std::size_t n_points, const MapParameters& mp,
                   const Threshold& thr, std::uint64_t seed);

// --- labeling kernels ---
// The parallel kernel is the production path; the serial one is the reference
// the tests compare against bit for bit.

void label_points(std::span<const StatePoint> points, int horizon, const Threshold& thr,
                  const MapParameters& mp, std::span<std::uint8_t> labels_out);

namespace serial {
void label_points(std::span<const StatePoint> points, int horizon, const Threshold& thr,
                  const MapParameters& mp, std::span<std::uint8_t> labels_out);
}

// --- boundary-distance statistics ---
// For each query, the distance to the nearest reference point carrying the
// opposite label. Misclassified samples should sit closer to the class
// boundary than random attractor points do.

std::vector<double> nearest_opposite_distances(std::span<const StatePoint> query_points,
                                               std::span<const std::uint8_t> query_labels,
                                               std::span<const StatePoint> ref_points,
                                               std::span<const std::uint8_t> ref_labels);

namespace serial {
std::vector<double> nearest_opposite_distances(std::span<const StatePoint> query_points,
                                               std::span<const std::uint8_t> query_labels,
                                               std::span<const StatePoint> ref_points,
                                               std::span<const std::uint8_t> ref_labels);
}

double median(std::vector<double> values);

// CSV exports: class maps as x,y,label and curve bundles as x,y,depth.
void write_classmap_csv(const std::string& path, const ClassMap& map);
void write_curves_csv(const std::string& path, const std::vector<PreimageCurve>& curves);

}  // namespace henon
