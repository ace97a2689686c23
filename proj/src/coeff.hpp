// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace lse {

/// Named time-varying coefficient u -> a(u) on [0,1]. Only serializable
/// built-ins are supported so specs round-trip through config files.
struct CoeffFn {
    enum class Kind { Constant, Affine, Sine };

    Kind kind = Kind::Constant;
    double a = 0.0;
    double b = 0.0;
    double freq = 1.0;

    double operator()(double u) const;
    bool constant() const;

    double max_abs(int grid = 1024) const;
    double min_value(int grid = 1024) const;
    double max_value(int grid = 1024) const;
    /// Grid argmax of |a(u)| over [0,1].
    double argmax_abs(int grid = 1024) const;

    static CoeffFn constant_fn(double c);
    static CoeffFn affine(double a0, double a1);
    static CoeffFn sine(double a0, double a1, double f);

    /// "const:c" | "affine:a,b" (a + b*u) | "sine:a,b,f" (a + b*sin(2*pi*f*u))
    static CoeffFn parse(std::string_view text);
    std::string str() const;
};

}  // namespace lse
