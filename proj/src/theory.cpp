#include "nested_spectra/theory.hpp"

#include "nested_spectra/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nested {

namespace {

constexpr double kPi = std::numbers::pi;

Complex newton_polish(Complex a3, Complex a2, Complex a1, Complex a0, Complex x) {
    for (int it = 0; it < 3; ++it) {
        const Complex p = ((a3 * x + a2) * x + a1) * x + a0;
        const Complex dp = (3.0 * a3 * x + 2.0 * a2) * x + a1;
        if (std::abs(dp) == 0.0) break;
        const Complex next = x - p / dp;
        if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
        const Complex pn = ((a3 * next + a2) * next + a1) * next + a0;
        if (std::abs(pn) >= std::abs(p)) break;
        x = next;
    }
    return x;
}

// Roots of a x^2 + b x + c with the cancellation-free form.
std::vector<Complex> solve_quadratic(Complex a, Complex b, Complex c) {
    if (a == 0.0) {
        if (b == 0.0) return {};
        return {-c / b};
    }
    Complex d = std::sqrt(b * b - 4.0 * a * c);
    if ((std::conj(b) * d).real() < 0.0) d = -d;
    const Complex q = -0.5 * (b + d);
    if (q == 0.0) return {Complex(0.0), Complex(0.0)};
    return {q / a, c / q};
}

Complex principal_cbrt(Complex z) {
    if (z == 0.0) return 0.0;
    return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

// Imaginary part below which a root is treated as real when deciding bulk membership.
double real_root_tolerance(Complex m) { return 1e-7 * (1.0 + std::abs(m)); }

// Picks the Stieltjes branch at a point far above the real axis where it is unambiguous.
Complex far_field_root(Complex s, double rho, const ShapeRatios& c) {
    const auto roots = [&] {
        const Mode2Cubic p = Mode2Cubic::at(s, rho, c);
        return solve_cubic(p.a3, p.a2, p.a1, p.a0);
    }();
    const Complex guess = -1.0 / s;
    Complex best = roots.front();
    for (const Complex& r : roots)
        if (std::abs(r - guess) < std::abs(best - guess)) best = r;
    return best;
}

// Follows the Stieltjes root from Re(s) + i*Y down to Re(s) + i*h_end.
Complex track_down(double re, double h_end, double rho, const ShapeRatios& c) {
    double h = 10.0 * (1.0 + std::abs(re));
    Complex m = far_field_root(Complex(re, h), rho, c);
    if (h <= h_end) return m;
    double ratio = 0.7;
    int refinements = 0;
    while (h > h_end) {
        const double next = std::max(h_end, h * ratio);
        const Mode2Cubic p = Mode2Cubic::at(Complex(re, next), rho, c);
        const auto roots = solve_cubic(p.a3, p.a2, p.a1, p.a0);
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = d1;
        Complex nearest = m;
        for (const Complex& r : roots) {
            const double d = std::abs(r - m);
            if (d < d1) {
                d2 = d1;
                d1 = d;
                nearest = r;
            } else if (d < d2) {
                d2 = d;
            }
        }
        // Take a shorter step when another root is nearly as close as the tracked one.
        if (d2 < 2.0 * d1 && ratio < 0.999 && refinements < 200) {
            ratio = 0.5 * (1.0 + ratio);
            ++refinements;
            continue;
        }
        m = nearest;
        h = next;
        ratio = std::max(0.7, ratio * ratio);
    }
    return m;
}

// Cumulative integration of a density on [lower, upper] after the
// substitution x = lower + (upper - lower) (1 - cos theta) / 2.
void build_cdf_table(const Law::Density& density, double lower, double upper, std::vector<double>& angles,
                     std::vector<double>& cumulative, double continuous_mass) {
    constexpr int kPanels = 8000;
    angles.resize(kPanels + 1);
    cumulative.resize(kPanels + 1);
    const double half = 0.5 * (upper - lower);
    std::vector<double> integrand(kPanels + 1);
    for (int i = 0; i <= kPanels; ++i) {
        const double theta = kPi * i / kPanels;
        angles[static_cast<std::size_t>(i)] = theta;
        const double x = lower + half * (1.0 - std::cos(theta));
        const double jac = half * std::sin(theta);
        double value = 0.0;
        if (i > 0 && i < kPanels) value = density(x) * jac;
        integrand[static_cast<std::size_t>(i)] = std::isfinite(value) ? value : 0.0;
    }
    cumulative[0] = 0.0;
    const double step = kPi / kPanels;
    for (int i = 1; i <= kPanels; ++i) {
        const auto u = static_cast<std::size_t>(i);
        cumulative[u] = cumulative[u - 1] + 0.5 * step * (integrand[u - 1] + integrand[u]);
    }
    const double total = cumulative.back();
    if (total > 0.0) {
        for (double& v : cumulative) v *= continuous_mass / total;
    }
}

}  // namespace

Mode2Cubic Mode2Cubic::at(Complex s, double rho, const ShapeRatios& c) {
    const double k = rho * c.b();
    return {Complex(k), 1.0 + s * k, s + rho * (c.c2 - c.c1) / (1.0 - c.c3), Complex(1.0)};
}

std::vector<Complex> solve_cubic(Complex a3, Complex a2, Complex a1, Complex a0) {
    const double lower_scale = std::max({std::abs(a2), std::abs(a1), std::abs(a0)});
    if (a3 == 0.0) return solve_quadratic(a2, a1, a0);

    std::vector<Complex> roots;
    if (std::abs(a3) <= 1e-8 * lower_scale && a2 != 0.0) {
        // One root escapes to infinity as a3 -> 0; the other two approach the
        // quadratic's roots. Vieta's sum gives the large root.
        roots = solve_quadratic(a2, a1, a0);
        Complex sum = 0.0;
        for (const Complex& r : roots) sum += r;
        roots.push_back(-a2 / a3 - sum);
    } else {
        const Complex b = a2 / a3;
        const Complex cc = a1 / a3;
        const Complex d = a0 / a3;
        const Complex p = cc - b * b / 3.0;
        const Complex q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
        const Complex disc = q * q / 4.0 + p * p * p / 27.0;
        const Complex sq = std::sqrt(disc);
        Complex cube = -0.5 * q + sq;
        const Complex other = -0.5 * q - sq;
        if (std::abs(other) > std::abs(cube)) cube = other;
        const Complex u = principal_cbrt(cube);
        const Complex omega(-0.5, std::sqrt(3.0) / 2.0);
        Complex rot = 1.0;
        for (int k = 0; k < 3; ++k) {
            Complex t;
            if (u == 0.0) {
                t = 0.0;
            } else {
                const Complex uk = rot * u;
                t = uk - p / (3.0 * uk);
            }
            roots.push_back(t - b / 3.0);
            rot *= omega;
        }
    }
    for (Complex& r : roots) r = newton_polish(a3, a2, a1, a0, r);
    return roots;
}

Complex stieltjes_mode2(Complex s, double rho, const ShapeRatios& c) {
    if (!(rho >= 0.0)) throw std::invalid_argument("stieltjes_mode2: rho_T must be >= 0");
    if (s.imag() < 0.0) return std::conj(stieltjes_mode2(std::conj(s), rho, c));

    const double re = s.real();
    if (s.imag() > 0.0) {
        // Far enough from the axis the sign rule alone identifies the branch.
        if (s.imag() >= 1e-2 * (1.0 + std::abs(re))) {
            const Mode2Cubic p = Mode2Cubic::at(s, rho, c);
            const auto roots = solve_cubic(p.a3, p.a2, p.a1, p.a0);
            int count = 0;
            Complex chosen;
            for (const Complex& r : roots) {
                if (r.imag() > 0.0) {
                    ++count;
                    chosen = r;
                }
            }
            if (count == 1) return chosen;
        }
        const Complex m = track_down(re, s.imag(), rho, c);
        if (!(m.imag() > 0.0)) {
            throw NumericError("stieltjes_mode2: no root with Im m > 0 at s = (" + std::to_string(re) + ", " +
                               std::to_string(s.imag()) + ")");
        }
        return m;
    }

    // Real axis: approach from above, then snap to the nearest root of the real cubic.
    const Complex tracked = track_down(re, 1e-12 * (1.0 + std::abs(re)), rho, c);
    const Mode2Cubic p = Mode2Cubic::at(Complex(re, 0.0), rho, c);
    const auto roots = solve_cubic(p.a3, p.a2, p.a1, p.a0);
    Complex best = roots.front();
    for (const Complex& r : roots)
        if (std::abs(r - tracked) < std::abs(best - tracked)) best = r;
    if (std::abs(best.imag()) > real_root_tolerance(best)) {
        throw DomainError("stieltjes_mode2: s = " + std::to_string(re) + " lies inside the support");
    }
    return Complex(best.real(), 0.0);
}

bool in_mode2_bulk(double t, double rho, const ShapeRatios& c) {
    try {
        stieltjes_mode2(Complex(t, 0.0), rho, c);
        return false;
    } catch (const DomainError&) {
        return true;
    }
}

Law::Law(std::string name, Density density, double lower, double upper, double atom_mass, double atom_location)
    : name_(std::move(name)),
      density_(std::move(density)),
      lower_(lower),
      upper_(upper),
      atom_mass_(atom_mass),
      atom_location_(atom_location) {
    if (!(upper > lower)) throw std::invalid_argument("Law: upper edge must exceed lower edge");
    build_cdf_table(density_, lower_, upper_, angles_, cumulative_, 1.0 - atom_mass_);
}

double Law::mass(int points) const {
    if (points < 3 || points % 2 == 0) throw std::invalid_argument("Law::mass: Simpson needs an odd point count >= 3");
    const double a = lower_ - 0.5;
    const double b = upper_ + 0.5;
    const double h = (b - a) / (points - 1);
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        const double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double f = density_(a + h * i);
        sum += w * (std::isfinite(f) ? f : 0.0);
    }
    return sum * h / 3.0 + atom_mass_;
}

double Law::cdf(double x) const {
    double continuous = 0.0;
    if (x >= upper_) {
        continuous = cumulative_.back();
    } else if (x > lower_) {
        const double ratio = std::clamp(1.0 - 2.0 * (x - lower_) / (upper_ - lower_), -1.0, 1.0);
        const double theta = std::acos(ratio);
        const double pos = theta / kPi * static_cast<double>(angles_.size() - 1);
        const auto i = std::min(static_cast<std::size_t>(pos), angles_.size() - 2);
        const double frac = pos - static_cast<double>(i);
        continuous = cumulative_[i] + frac * (cumulative_[i + 1] - cumulative_[i]);
    }
    return continuous + (x >= atom_location_ ? atom_mass_ : 0.0);
}

std::vector<double> Law::tabulate(std::span<const double> grid) const {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) out.push_back(density_(x));
    return out;
}

void Law::set_samples(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size()) throw std::invalid_argument("Law::set_samples: size mismatch");
    grid_ = std::move(grid);
    values_ = std::move(values);
}

Support mode2_support(double rho, const ShapeRatios& c, double eta) {
    constexpr double kFloor = 1e-4;
    auto density = [&](double t) { return stieltjes_mode2(Complex(t, eta), rho, c).imag() / kPi; };

    // Expand the scan window until both ends are clear of the bulk.
    double half_width = 4.0 + 4.0 * rho;
    constexpr int kScan = 4000;
    std::vector<double> values(kScan + 1);
    double lo = 0.0;
    double step = 0.0;
    int first = -1;
    int last = -1;
    for (int attempt = 0; attempt < 20; ++attempt) {
        lo = -half_width;
        step = 2.0 * half_width / kScan;
        first = last = -1;
        for (int i = 0; i <= kScan; ++i) {
            values[static_cast<std::size_t>(i)] = density(lo + step * i);
            if (values[static_cast<std::size_t>(i)] > kFloor) {
                if (first < 0) first = i;
                last = i;
            }
        }
        if (first > 0 && last < kScan) break;
        half_width *= 2.0;
    }
    if (first <= 0 || last >= kScan) throw NumericError("mode2_support: could not bracket the bulk");

    auto bisect = [](auto&& inside, double out_point, double in_point) {
        for (int it = 0; it < 200 && std::abs(in_point - out_point) > 1e-14 * (1.0 + std::abs(in_point)); ++it) {
            const double mid = 0.5 * (out_point + in_point);
            (inside(mid) ? in_point : out_point) = mid;
        }
        return 0.5 * (out_point + in_point);
    };
    auto above_floor = [&](double t) { return density(t) > kFloor; };
    double lower = bisect(above_floor, lo + step * (first - 1), lo + step * first);
    double upper = bisect(above_floor, lo + step * (last + 1), lo + step * last);

    // Refine: the true edge is where the tracked root becomes real.
    auto bulk = [&](double t) { return in_mode2_bulk(t, rho, c); };
    if (bulk(lower) && !bulk(lower - step)) lower = bisect(bulk, lower - step, lower);
    if (bulk(upper) && !bulk(upper + step)) upper = bisect(bulk, upper + step, upper);
    return {lower, upper};
}

Law lsd_density_mode2(std::span<const double> grid, double rho, const ShapeRatios& c, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("lsd_density_mode2: eta must be positive");
    const Support support = mode2_support(rho, c, eta);
    auto density = [rho, c, eta](double t) { return stieltjes_mode2(Complex(t, eta), rho, c).imag() / kPi; };
    Law law("mode2", density, support.lower, support.upper);
    std::vector<double> g(grid.begin(), grid.end());
    law.set_samples(g, law.tabulate(grid));
    return law;
}

double semicircle(double x) {
    const double r = 4.0 - x * x;
    return r > 0.0 ? std::sqrt(r) / (2.0 * kPi) : 0.0;
}

Law semicircle_law() { return Law("semicircle", semicircle, -2.0, 2.0); }

MpEdges mp_edges(const ShapeRatios& c) {
    const double ra = std::sqrt(c.a());
    const double rb = std::sqrt(c.b());
    return {(ra - rb) * (ra - rb), (ra + rb) * (ra + rb), std::max(0.0, 1.0 - c.c1 / c.c2)};
}

double mp_density(double x, const ShapeRatios& c) {
    const MpEdges e = mp_edges(c);
    if (x <= 0.0 || x <= e.lower || x >= e.upper) return 0.0;
    return std::sqrt((x - e.lower) * (e.upper - x)) / (2.0 * kPi * c.b() * x);
}

Law mp_law(const ShapeRatios& c) {
    const MpEdges e = mp_edges(c);
    return Law("marchenko-pastur", [c](double x) { return mp_density(x, c); }, e.lower, e.upper, e.atom, 0.0);
}

SpikePrediction spike2(double rho, double beta_M, const ShapeRatios& c) {
    if (!(rho > 0.0) || !(beta_M > 0.0)) throw std::invalid_argument("spike2: rho_T and beta_M must be positive");
    const double a = c.a();
    const double b = c.b();
    const double bm2 = beta_M * beta_M;
    const double location = rho / bm2 * (a + bm2) * (b + bm2) + 1.0 / (rho * (b + bm2));
    const double ratio = bm2 / (rho * (b + bm2));
    const double zeta = 1.0 - (ratio * ratio + b * (a + bm2)) / (bm2 * (b + bm2));
    return {location, std::max(zeta, 0.0), zeta > 0.0, zeta};
}

double phase_transition_asymptote(const ShapeRatios& c) { return std::pow(c.a() * c.b(), 0.25); }

double phase_transition_rho(double beta_M, const ShapeRatios& c) {
    const double bm2 = beta_M * beta_M;
    const double gap = bm2 * bm2 - c.a() * c.b();
    if (!(gap > 0.0)) {
        throw DomainError("phase_transition_rho: beta_M = " + std::to_string(beta_M) +
                          " is at or below the asymptote; no rho_T gives zeta > 0");
    }
    return bm2 / ((c.b() + bm2) * std::sqrt(gap));
}

SpikePrediction spike_oracle(double beta_T, double beta_M, const ShapeRatios& c, double varsigma2) {
    if (!(varsigma2 > 0.0)) throw std::invalid_argument("spike_oracle: varsigma^2 must be positive");
    const double a = c.a();
    const double b = c.b();
    const double x = beta_T * beta_T * beta_M * beta_M / varsigma2;
    if (!(x > 0.0)) return {0.0, 0.0, false, 0.0};
    const double location = (x + a) * (x + b) / x;
    const double zeta = 1.0 - b / x * (x + a) / (x + b);
    const bool detectable = x * x > a * b;
    return {location, detectable ? std::max(zeta, 0.0) : 0.0, detectable, zeta};
}

SpikePrediction spike3(double varrho) {
    if (!(varrho > 0.0)) throw std::invalid_argument("spike3: varrho must be positive");
    const double zeta = 1.0 - 1.0 / (varrho * varrho);
    return {varrho + 1.0 / varrho, std::max(zeta, 0.0), varrho > 1.0, zeta};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

AccuracyPrediction accuracy_from_alignment(double zeta) {
    if (std::isnan(zeta)) throw std::invalid_argument("accuracy_from_alignment: zeta is NaN");
    if (zeta >= 1.0) return {1.0, false};
    if (zeta < 0.0) return {0.5, true};
    return {normal_cdf(std::sqrt(zeta / (1.0 - zeta))), false};
}

double multiview_zeta(const MultiViewParams& p) {
    const double mu2 = p.mu.squaredNorm();
    const double h2 = p.h.squaredNorm();
    if (!(mu2 > 0.0) || !(h2 > 0.0)) throw std::invalid_argument("multiview_zeta: |mu| and |h| must be positive");
    const double total = static_cast<double>(p.p + p.n + p.m);
    const double cp = p.p / total;
    const double cn = p.n / total;
    const double cm = p.m / total;
    const double rho = h2 * total /
                       (std::sqrt(static_cast<double>(p.p)) * std::sqrt(static_cast<double>(p.n)) *
                        std::sqrt(static_cast<double>(p.m)));
    const double kn = cn / (1.0 - cm);
    const double kp = cp / (1.0 - cm);
    const double inner = mu2 / (rho * (kn + mu2));
    return 1.0 - (inner * inner + kn * (kp + mu2)) / (mu2 * (kn + mu2));
}

SpikePrediction multiview_oracle(const MultiViewParams& p) {
    const GeneralParams g = p.as_general();
    return spike_oracle(g.beta_T(), g.beta_M, p.ratios(), varsigma2(g));
}

}  // namespace nested
