#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace besovtight {

inline constexpr int kDefaultBins = 32;

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

/// Mean with a binning (batch-means) standard error: the series is cut into
/// `bins` contiguous blocks and the stderr is that of the block means. With
/// fewer samples than bins every sample is its own block.
inline Estimate binned_mean(std::span<const double> xs, int bins = kDefaultBins) {
    if (xs.empty()) throw std::invalid_argument("binned_mean: empty sample");
    if (bins < 2) throw std::invalid_argument("binned_mean: need at least 2 bins");
    Estimate e;
    e.n = xs.size();
    double sum = 0.0;
    for (double x : xs) sum += x;
    e.mean = sum / static_cast<double>(xs.size());
    const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(bins), xs.size());
    if (nb < 2) return e;
    const std::size_t per = xs.size() / nb;
    std::vector<double> means(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * per, hi = (b + 1 == nb) ? xs.size() : lo + per;
        double s = 0.0;
        for (std::size_t t = lo; t < hi; ++t) s += xs[t];
        means[b] = s / static_cast<double>(hi - lo);
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= static_cast<double>(nb);
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    var /= static_cast<double>(nb - 1);
    e.stderr_ = std::sqrt(var / static_cast<double>(nb));
    return e;
}

/// Mean and standard error of independent samples (e.g. one value per chain).
inline Estimate independent_mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("independent_mean: empty sample");
    Estimate e;
    e.n = xs.size();
    double s = 0.0;
    for (double x : xs) s += x;
    e.mean = s / static_cast<double>(xs.size());
    if (xs.size() < 2) return e;
    double var = 0.0;
    for (double x : xs) var += (x - e.mean) * (x - e.mean);
    var /= static_cast<double>(xs.size() - 1);
    e.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return e;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double chi2 = 0.0;
    std::size_t points = 0;
};

/// Weighted least squares y = intercept + slope x. With inverse-variance
/// weights the parameter errors come from the normal matrix, inflated by
/// sqrt(chi2 / dof) when the scatter exceeds the quoted errors.
inline LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> w) {
    const std::size_t n = x.size();
    if (y.size() != n || w.size() != n) throw std::invalid_argument("weighted_linear_fit: size mismatch");
    if (n < 2) throw std::invalid_argument("weighted_linear_fit: need at least 2 points");
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        S += w[i];
        Sx += w[i] * x[i];
        Sy += w[i] * y[i];
        Sxx += w[i] * x[i] * x[i];
        Sxy += w[i] * x[i] * y[i];
    }
    const double det = S * Sxx - Sx * Sx;
    if (!(det > 0)) throw std::invalid_argument("weighted_linear_fit: degenerate abscissae");
    LinearFit f;
    f.points = n;
    f.slope = (S * Sxy - Sx * Sy) / det;
    f.intercept = (Sxx * Sy - Sx * Sxy) / det;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        f.chi2 += w[i] * r * r;
    }
    const double dof = static_cast<double>(n) - 2.0;
    const double inflate = dof > 0 ? std::max(1.0, f.chi2 / dof) : 1.0;
    f.slope_stderr = std::sqrt(S / det * inflate);
    f.intercept_stderr = std::sqrt(Sxx / det * inflate);
    return f;
}

/// Ordinary least squares with residual-based errors.
inline LinearFit unweighted_linear_fit(std::span<const double> x, std::span<const double> y) {
    std::vector<double> w(x.size(), 1.0);
    LinearFit f = weighted_linear_fit(x, y, w);
    const double dof = static_cast<double>(x.size()) - 2.0;
    const double s2 = dof > 0 ? f.chi2 / dof : 0.0;
    double S = 0, Sx = 0, Sxx = 0;
    for (double v : x) {
        S += 1;
        Sx += v;
        Sxx += v * v;
    }
    const double det = S * Sxx - Sx * Sx;
    f.slope_stderr = std::sqrt(S / det * s2);
    f.intercept_stderr = std::sqrt(Sxx / det * s2);
    return f;
}

/// One point of a log-log fit: abscissa, positive value and its standard error.
struct ScalingPoint {
    double x = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;
};

struct PowerFit {
    LinearFit fit;  // log2(value) = intercept + slope * x_transform
    std::vector<std::string> warnings;
};

/// Weighted fit of log2(value) against `x` (already transformed by the caller).
/// Weights 1 / (stderr / value)^2; non-positive values are dropped with a
/// warning; if any kept point has zero stderr the fit is unweighted.
inline PowerFit fit_log2_values(std::span<const ScalingPoint> pts, std::size_t min_points = 3) {
    PowerFit out;
    std::vector<double> xs, ys, ws;
    bool exact = false;
    for (const auto& p : pts) {
        if (!(p.value > 0) || !std::isfinite(p.value)) {
            out.warnings.push_back("point at x = " + std::to_string(p.x) + " has non-positive value; excluded");
            continue;
        }
        xs.push_back(p.x);
        ys.push_back(std::log2(p.value));
        const double rel = p.stderr_ / p.value;
        if (!(rel > 0)) exact = true;
        ws.push_back(rel > 0 ? 1.0 / (rel * rel) : 0.0);
    }
    if (xs.size() < min_points)
        throw std::invalid_argument("fit needs at least " + std::to_string(min_points) + " usable points, got " +
                                    std::to_string(xs.size()));
    out.fit = exact ? unweighted_linear_fit(xs, ys) : weighted_linear_fit(xs, ys, ws);
    return out;
}

}  // namespace besovtight
