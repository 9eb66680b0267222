#pragma once

namespace nested {

/// Dimension ratios (c1, c2, c3) = (n1, n2, n3) / (n1 + n2 + n3).
struct ShapeRatios {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;

    /// Validates positivity and unit sum (to 1e-12); throws std::invalid_argument.
    static ShapeRatios make(double c1, double c2, double c3);

    /// Exact ratios of finite dimensions.
    static ShapeRatios from_dims(long n1, long n2, long n3);

    /// c1 / (1 - c3), the share of n1 within n1 + n2.
    double a() const noexcept { return c1 / (1.0 - c3); }
    /// c2 / (1 - c3).
    double b() const noexcept { return c2 / (1.0 - c3); }
};

}  // namespace nested
