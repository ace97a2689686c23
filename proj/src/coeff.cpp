// SPDX-License-Identifier: Apache-2.0
#include "coeff.hpp"

#include <cmath>

#include "util.hpp"

namespace lse {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double CoeffFn::operator()(double u) const {
    switch (kind) {
        case Kind::Constant: return a;
        case Kind::Affine: return a + b * u;
        case Kind::Sine: return a + b * std::sin(kTwoPi * freq * u);
    }
    return a;
}

bool CoeffFn::constant() const { return kind == Kind::Constant || b == 0.0; }

double CoeffFn::max_abs(int grid) const {
    double m = 0;
    for (int i = 0; i <= grid; ++i) m = std::max(m, std::fabs((*this)(double(i) / grid)));
    return m;
}

double CoeffFn::min_value(int grid) const {
    double m = (*this)(0.0);
    for (int i = 1; i <= grid; ++i) m = std::min(m, (*this)(double(i) / grid));
    return m;
}

double CoeffFn::max_value(int grid) const {
    double m = (*this)(0.0);
    for (int i = 1; i <= grid; ++i) m = std::max(m, (*this)(double(i) / grid));
    return m;
}

double CoeffFn::argmax_abs(int grid) const {
    double best_u = 0, best = std::fabs((*this)(0.0));
    for (int i = 1; i <= grid; ++i) {
        double u = double(i) / grid;
        double v = std::fabs((*this)(u));
        if (v > best) {
            best = v;
            best_u = u;
        }
    }
    return best_u;
}

CoeffFn CoeffFn::constant_fn(double c) { return {Kind::Constant, c, 0.0, 1.0}; }
CoeffFn CoeffFn::affine(double a0, double a1) { return {Kind::Affine, a0, a1, 1.0}; }
CoeffFn CoeffFn::sine(double a0, double a1, double f) { return {Kind::Sine, a0, a1, f}; }

CoeffFn CoeffFn::parse(std::string_view text) {
    auto pos = text.find(':');
    require(pos != std::string_view::npos, Errc::InvalidArgument,
            "coefficient must look like kind:params, got '" + std::string(text) + "'");
    std::string kind(text.substr(0, pos));
    auto args = split(text.substr(pos + 1), ',');
    if (kind == "const") {
        require(args.size() == 1, Errc::InvalidArgument, "const coefficient takes 1 parameter");
        return constant_fn(parse_double(args[0], "coefficient"));
    }
    if (kind == "affine") {
        require(args.size() == 2, Errc::InvalidArgument, "affine coefficient takes 2 parameters");
        return affine(parse_double(args[0], "coefficient"), parse_double(args[1], "coefficient"));
    }
    if (kind == "sine") {
        require(args.size() == 3, Errc::InvalidArgument, "sine coefficient takes 3 parameters");
        return sine(parse_double(args[0], "coefficient"), parse_double(args[1], "coefficient"),
                    parse_double(args[2], "coefficient"));
    }
    fail(Errc::InvalidArgument, "unknown coefficient kind '" + kind + "'");
}

std::string CoeffFn::str() const {
    switch (kind) {
        case Kind::Constant: return "const:" + format_double(a);
        case Kind::Affine: return "affine:" + format_double(a) + "," + format_double(b);
        case Kind::Sine:
            return "sine:" + format_double(a) + "," + format_double(b) + "," + format_double(freq);
    }
    return "";
}

}  // namespace lse
