// SPDX-License-Identifier: Apache-2.0
#include "estimators.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace lse {

double KernelSpec::operator()(double u) const {
    double a = std::fabs(u);
    if (a > 0.5) return 0.0;
    switch (name) {
        case Name::Rectangular: return 1.0;
        case Name::Triangular: return 4.0 * (0.5 - a);
        case Name::Epanechnikov: return 1.5 * (1.0 - 4.0 * u * u);
    }
    return 0.0;
}

KernelSpec KernelSpec::get(Name name) {
    switch (name) {
        case Name::Rectangular: return {name, 0.0, 1.0, 1.0};
        case Name::Triangular: return {name, 4.0, 4.0 / 3.0, 2.0};
        case Name::Epanechnikov: return {name, 6.0, 6.0 / 5.0, 1.5};
    }
    return {};
}

KernelSpec KernelSpec::parse(std::string_view text) {
    if (text == "rect" || text == "rectangular") return get(Name::Rectangular);
    if (text == "tri" || text == "triangular") return get(Name::Triangular);
    if (text == "epan" || text == "epanechnikov") return get(Name::Epanechnikov);
    fail(Errc::InvalidArgument, "unknown kernel '" + std::string(text) + "'");
}

const char* KernelSpec::str() const {
    switch (name) {
        case Name::Rectangular: return "rect";
        case Name::Triangular: return "tri";
        case Name::Epanechnikov: return "epan";
    }
    return "?";
}

double kernel_l2(const KernelSpec& kernel) { return kernel.l2norm; }

EmpiricalProcessSample edf(std::span<const double> path, std::span<const double> xgrid) {
    require(!path.empty(), Errc::InvalidArgument, "empty path");
    std::vector<double> sorted(path.begin(), path.end());
    std::sort(sorted.begin(), sorted.end());
    EmpiricalProcessSample out;
    out.n = static_cast<long>(path.size());
    out.xgrid.assign(xgrid.begin(), xgrid.end());
    out.values.resize(xgrid.size());
    for (std::size_t t = 0; t < xgrid.size(); ++t) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), xgrid[t]);
        out.values[t] = static_cast<double>(it - sorted.begin()) /
                        static_cast<double>(path.size());
    }
    return out;
}

EmpiricalProcessSample localized_edf(std::span<const double> path,
                                     std::span<const double> xgrid, double v, double h,
                                     const KernelSpec& kernel) {
    require(!path.empty(), Errc::InvalidArgument, "empty path");
    require(h > 0.0, Errc::InvalidArgument, "bandwidth h must be positive");
    require(v > 0.0 && v < 1.0, Errc::InvalidArgument, "v must lie in (0,1)");
    require(v >= h / 2.0 && v <= 1.0 - h / 2.0, Errc::Domain,
            "v = " + format_double(v) + " is within h/2 = " + format_double(h / 2.0) +
                " of the boundary; the kernel window [v-h/2, v+h/2] must stay inside (0,1)");

    long n = static_cast<long>(path.size());
    long lo = std::max<long>(1, static_cast<long>(std::ceil((v - h / 2.0) * n)));
    long hi = std::min<long>(n, static_cast<long>(std::floor((v + h / 2.0) * n)));
    require(lo <= hi, Errc::Domain,
            "no observations fall in the kernel window [" + format_double(v - h / 2.0) + ", " +
                format_double(v + h / 2.0) + "] at n = " + std::to_string(n));

    // weights and the observations in the effective window, sorted by value
    std::vector<std::pair<double, double>> wx;  // (X_i, weight)
    wx.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) {
        double w = kernel((static_cast<double>(i) / n - v) / h);
        if (w != 0.0) wx.emplace_back(path[i - 1], w);
    }
    require(!wx.empty(), Errc::Domain, "all kernel weights vanish in the window");
    std::sort(wx.begin(), wx.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> prefix(wx.size() + 1, 0.0);
    for (std::size_t i = 0; i < wx.size(); ++i) prefix[i + 1] = prefix[i] + wx[i].second;

    EmpiricalProcessSample out;
    out.n = n;
    out.h = h;
    out.v = v;
    out.xgrid.assign(xgrid.begin(), xgrid.end());
    out.values.resize(xgrid.size());
    double norm = 1.0 / (static_cast<double>(n) * h);
    for (std::size_t t = 0; t < xgrid.size(); ++t) {
        // count of pairs with X_i <= x
        std::size_t loi = 0, hii = wx.size();
        while (loi < hii) {
            std::size_t mid = (loi + hii) / 2;
            if (wx[mid].first <= xgrid[t])
                loi = mid + 1;
            else
                hii = mid;
        }
        out.values[t] = prefix[loi] * norm;
    }
    return out;
}

std::vector<double> kde(std::span<const double> path, std::span<const double> xgrid,
                        std::span<const double> vgrid, double h1, double h2,
                        const KernelSpec& kernel) {
    require(!path.empty(), Errc::InvalidArgument, "empty path");
    require(h1 > 0.0 && h2 > 0.0, Errc::InvalidArgument, "bandwidths must be positive");
    long n = static_cast<long>(path.size());
    std::vector<double> out(xgrid.size() * vgrid.size(), 0.0);
    double norm = 1.0 / (static_cast<double>(n) * h1 * h2);

    parallel_for(vgrid.size(), [&](std::size_t vi) {
        double v = vgrid[vi];
        long lo = std::max<long>(1, static_cast<long>(std::ceil((v - h1 / 2.0) * n)));
        long hi = std::min<long>(n, static_cast<long>(std::floor((v + h1 / 2.0) * n)));
        require(lo <= hi, Errc::Domain,
                "no observations fall in the kernel window around v = " + format_double(v));
        double* row = out.data() + vi * xgrid.size();
        for (long i = lo; i <= hi; ++i) {
            double w1 = kernel((static_cast<double>(i) / n - v) / h1);
            if (w1 == 0.0) continue;
            double x_i = path[i - 1];
            for (std::size_t t = 0; t < xgrid.size(); ++t) {
                double dx = x_i - xgrid[t];
                if (std::fabs(dx) > h2 / 2.0) continue;
                row[t] += w1 * kernel(dx / h2);
            }
        }
        for (std::size_t t = 0; t < xgrid.size(); ++t) row[t] *= norm;
    });
    return out;
}

}  // namespace lse
