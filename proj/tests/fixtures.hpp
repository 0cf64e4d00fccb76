#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "evobank/core.hpp"

namespace fixtures {

inline evobank::CandidatePoint point(std::string id, std::vector<double> embedding, double quality = 0.0,
                                     std::string source = {}) {
    evobank::CandidatePoint p;
    p.id = std::move(id);
    p.embedding = std::move(embedding);
    p.quality = quality;
    p.source = std::move(source);
    return p;
}

inline std::string padded(const std::string& prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%05zu", i);
    return prefix + buf;
}

struct MixtureOptions {
    std::size_t clusters = 8;
    double center_scale = 10.0;
    double spread = 1.0;
    // quality = quality_base + density_gain * (relative cluster weight) + noise
    double quality_base = 3.0;
    double density_gain = 2.0;
    double quality_noise = 0.5;
    std::string prefix = "p";
};

/// Gaussian mixture with unequal cluster weights. Denser clusters get higher
/// quality on average.
inline std::vector<evobank::CandidatePoint> gaussian_mixture(std::uint64_t seed, std::size_t n, std::size_t dim,
                                                             const MixtureOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight_draw(0.2, 1.0);

    std::vector<std::vector<double>> centers(opt.clusters, std::vector<double>(dim));
    for (auto& c : centers)
        for (auto& v : c) v = opt.center_scale * unit(rng);
    std::vector<double> weights(opt.clusters);
    double max_w = 0.0;
    for (auto& w : weights) {
        w = weight_draw(rng);
        w = w * w;
        max_w = std::max(max_w, w);
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

    std::vector<evobank::CandidatePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = pick(rng);
        std::vector<double> e(dim);
        for (std::size_t d = 0; d < dim; ++d) e[d] = centers[c][d] + opt.spread * unit(rng);
        const double q = opt.quality_base + opt.density_gain * weights[c] / max_w + opt.quality_noise * unit(rng);
        out.push_back(point(padded(opt.prefix, i), std::move(e), q, "cluster" + std::to_string(c)));
    }
    return out;
}

/// Uniform points in a box, quality uniform in [1, 6].
inline std::vector<evobank::CandidatePoint> uniform_pool(std::uint64_t seed, std::size_t n, std::size_t dim,
                                                         double extent = 1.0, const std::string& prefix = "u") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-extent, extent);
    std::uniform_real_distribution<double> quality(1.0, 6.0);
    std::vector<evobank::CandidatePoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(dim);
        for (auto& v : e) v = coord(rng);
        out.push_back(point(padded(prefix, i), std::move(e), quality(rng)));
    }
    return out;
}

}  // namespace fixtures
