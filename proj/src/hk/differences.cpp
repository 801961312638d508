#include "hk/differences.hpp"

#include "hk/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hk {

std::vector<double> fd_weights(double z, const std::vector<double>& xs) {
    const std::size_t m = xs.size();
    // c[j][k]: weight of node j for derivative order k (k = 0, 1)
    std::vector<std::array<double, 2>> c(m, {0.0, 0.0});
    double c1 = 1.0, c4 = xs[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
        double c2 = 1.0, c5 = c4;
        c4 = xs[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                c[i][1] = c1 * (c[i - 1][0] - c5 * c[i - 1][1]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            c[j][1] = (c4 * c[j][1] - c[j][0]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = c[j][1];
    return w;
}

namespace {

std::vector<double> apply(const Trajectory& tr, const std::vector<std::size_t>& idx, std::size_t at) {
    std::vector<double> ts;
    for (auto k : idx) ts.push_back(tr.times()[k]);
    auto w = fd_weights(tr.times()[at], ts);
    std::vector<double> d(tr.state(at).size(), 0.0);
    for (std::size_t m = 0; m < idx.size(); ++m)
        for (std::size_t c = 0; c < d.size(); ++c) d[c] += w[m] * tr.state(idx[m])[c];
    return d;
}

// Picks up to `want` samples from [lo, hi] nearest to k, skipping samples crowding a chosen one.
std::vector<std::size_t> stencil(const Trajectory& tr, std::size_t k, std::size_t lo, std::size_t hi, int want,
                                 double min_gap) {
    const auto& t = tr.times();
    std::vector<std::size_t> chosen{k};
    std::size_t l = k, r = k;
    auto ok = [&](std::size_t c) {
        for (auto s : chosen)
            if (std::abs(t[c] - t[s]) < min_gap) return false;
        return true;
    };
    while (static_cast<int>(chosen.size()) < want) {
        bool can_l = l > lo, can_r = r < hi;
        if (!can_l && !can_r) break;
        bool take_left;
        if (can_l && can_r)
            take_left = (t[k] - t[l - 1]) <= (t[r + 1] - t[k]);
        else
            take_left = can_l;
        std::size_t c = take_left ? --l : ++r;
        if (ok(c)) chosen.push_back(c);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

VelocityEstimates estimate_velocities(const Trajectory& tr, int want) {
    const std::size_t S = tr.size();
    if (S < 2) fail(ErrorKind::Sampling, "trajectory needs at least two samples");
    const auto& t = tr.times();
    VelocityEstimates out;
    out.at.resize(S);
    out.breakpoint.assign(S, 0);
    out.breakpoint[0] = out.breakpoint[S - 1] = 1;

    auto pl = tr.info.find("piecewise_linear");
    if (pl != tr.info.end() && pl->second != 0.0) {
        for (std::size_t k = 0; k + 1 < S; ++k) {
            std::vector<double> d(tr.state(k).size());
            for (std::size_t c = 0; c < d.size(); ++c)
                d[c] = (tr.state(k + 1)[c] - tr.state(k)[c]) / (t[k + 1] - t[k]);
            out.at[k].push_back(std::move(d));
            out.breakpoint[k] = 1;
        }
        return out;
    }

    std::vector<double> gaps;
    for (std::size_t k = 1; k < S; ++k) gaps.push_back(t[k] - t[k - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
    const double hmed = gaps[gaps.size() / 2];
    const double min_gap = 0.2 * hmed;

    auto events = tr.event_times();
    if (!events.empty()) {
        std::size_t k = 0;
        for (double te : events) {
            while (k < S && t[k] < te - 1e-12 * std::max(1.0, std::abs(te))) ++k;
            if (k < S && std::abs(t[k] - te) <= 1e-12 * std::max(1.0, std::abs(te))) out.breakpoint[k] = 1;
        }
    } else if (S >= 5) {
        // Kink detection: one-sided second-order estimates disagreeing well beyond their truncation error.
        for (std::size_t k = 2; k + 2 < S; ++k) {
            auto L = apply(tr, {k - 2, k - 1, k}, k);
            auto R = apply(tr, {k, k + 1, k + 2}, k);
            double h = std::max(t[k] - t[k - 2], t[k + 2] - t[k]);
            double scale = 0.0;
            for (double v : L) scale = std::max(scale, std::abs(v));
            if (dist(L, R) > 1e-2 * std::max(scale, 1e-3) + 50.0 * h * h) out.breakpoint[k] = 1;
        }
    }

    std::vector<std::size_t> bps;
    for (std::size_t k = 0; k < S; ++k)
        if (out.breakpoint[k]) bps.push_back(k);
    for (std::size_t b = 0; b + 1 < bps.size(); ++b) {
        std::size_t lo = bps[b], hi = bps[b + 1];
        for (std::size_t k = lo; k <= hi; ++k) {
            auto idx = stencil(tr, k, lo, hi, want, min_gap);
            if (idx.size() < 2) continue;
            out.at[k].push_back(apply(tr, idx, k));
        }
    }
    return out;
}

}  // namespace hk
