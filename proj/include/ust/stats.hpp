#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ust/errors.hpp"

namespace ust {

/// Monte Carlo estimate. Censored replicates (walk budget or coordinate window exhausted)
/// are left out of the mean and counted separately.
struct EstimateResult {
    double mean = 0;
    double std_error = 0;       // sample standard deviation / sqrt(replicates)
    std::uint64_t replicates = 0;  // replicates entering the mean
    std::uint64_t censored_count = 0;
    std::uint64_t seed = 0;
    std::string streams;  // how replica streams derive from the seed

    std::uint64_t attempted() const noexcept { return replicates + censored_count; }
    double censored() const noexcept {
        return attempted() == 0 ? 0.0 : static_cast<double>(censored_count) / static_cast<double>(attempted());
    }

    friend bool operator==(const EstimateResult&, const EstimateResult&) = default;
};

inline std::string replica_stream_description(unsigned roles) {
    return "philox4x32-10; key = seed; counter high word = replica * 8 + role; roles used: " + std::to_string(roles);
}

/// Mean and standard error of the uncensored values, in index order.
inline EstimateResult summarize(std::span<const std::optional<double>> values, std::uint64_t seed, std::string streams) {
    EstimateResult r;
    r.seed = seed;
    r.streams = std::move(streams);
    double sum = 0;
    for (const auto& v : values) {
        if (!v) {
            ++r.censored_count;
            continue;
        }
        ++r.replicates;
        sum += *v;
    }
    if (r.replicates == 0) return r;
    r.mean = sum / static_cast<double>(r.replicates);
    if (r.replicates > 1) {
        double ss = 0;
        for (const auto& v : values)
            if (v) ss += (*v - r.mean) * (*v - r.mean);
        const double sd = std::sqrt(ss / static_cast<double>(r.replicates - 1));
        r.std_error = sd / std::sqrt(static_cast<double>(r.replicates));
    }
    return r;
}

struct PowerPoint {
    double r = 0;
    double value = 0;
    double std_error = 0;
};

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // root mean square of log-space residuals
    double slope_error = 0;
    std::vector<std::pair<double, double>> points;  // (log r, log value)
    bool weighted = false;
};

/// Least squares of log value against log r. Each point is weighted by the inverse square of
/// its relative standard error (the delta-method error of the log) when every point has a
/// positive standard error; otherwise the fit is unweighted.
inline SlopeFit fit_power_law(std::span<const PowerPoint> pts) {
    if (pts.size() < 3) throw PreconditionError("fit_power_law needs at least 3 points");
    SlopeFit fit;
    fit.weighted = true;
    for (const auto& p : pts) {
        if (!(p.r > 0)) throw PreconditionError("fit_power_law: separation must be positive");
        if (!(p.value > 0))
            throw PreconditionError("fit_power_law: estimate " + std::to_string(p.value) +
                                    " at r = " + std::to_string(p.r) + " is not positive, cannot take its log");
        if (!(p.std_error > 0)) fit.weighted = false;
        fit.points.emplace_back(std::log(p.r), std::log(p.value));
    }
    if (std::all_of(pts.begin(), pts.end(), [&](const PowerPoint& p) { return p.r == pts[0].r; }))
        throw PreconditionError("fit_power_law: all separations are equal");
    std::vector<double> w(pts.size(), 1.0);
    if (fit.weighted)
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double rel = pts[i].std_error / pts[i].value;
            w[i] = 1.0 / (rel * rel);
        }
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sw += w[i];
        sx += w[i] * fit.points[i].first;
        sy += w[i] * fit.points[i].second;
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dx = fit.points[i].first - mx;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (fit.points[i].second - my);
    }
    if (sxx == 0) throw PreconditionError("fit_power_law: all separations are equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (const auto& [x, y] : fit.points) {
        const double e = y - (fit.intercept + fit.slope * x);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(pts.size()));
    fit.slope_error = fit.weighted ? std::sqrt(1.0 / sxx) : std::sqrt(rss / static_cast<double>(pts.size() - 2) / sxx);
    return fit;
}

}  // namespace ust
