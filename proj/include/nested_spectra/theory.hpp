#pragma once

#include "nested_spectra/model.hpp"
#include "nested_spectra/shape_ratios.hpp"

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nested {

using Complex = std::complex<double>;

/// Coefficients (a3, a2, a1, a0) of the cubic satisfied by the Stieltjes
/// transform of the centered-and-scaled mode-2 Gram spectrum:
///   a3 = rho c2/(1-c3),  a2 = 1 + s a3,  a1 = s + rho (c2-c1)/(1-c3),  a0 = 1.
struct Mode2Cubic {
    Complex a3, a2, a1, a0;

    static Mode2Cubic at(Complex s, double rho, const ShapeRatios& c);
    Complex operator()(Complex m) const { return ((a3 * m + a2) * m + a1) * m + a0; }
    Complex derivative(Complex m) const { return (3.0 * a3 * m + 2.0 * a2) * m + a1; }
};

/// All roots of a3 x^3 + a2 x^2 + a1 x + a0 (degree drops when leading
/// coefficients vanish), each refined by Newton steps.
std::vector<Complex> solve_cubic(Complex a3, Complex a2, Complex a1, Complex a0);

/**
 * Stieltjes transform of the mode-2 limiting law at s.
 *
 * Off the real axis the returned root satisfies Im(m) Im(s) > 0. Near the
 * axis, where several roots are almost real, the root is followed down a
 * vertical path from s + i 10 (1 + |s|), where the branch m ~ -1/s is
 * unambiguous. For real s outside the support the real root connected to
 * that branch is returned; real s inside the support throws DomainError.
 */
Complex stieltjes_mode2(Complex s, double rho, const ShapeRatios& c);

/// True when real t lies inside the support of the mode-2 law.
bool in_mode2_bulk(double t, double rho, const ShapeRatios& c);

/**
 * A limiting spectral law on the real line: density on [lower, upper] plus
 * an optional atom.
 *
 * The CDF is tabulated once on a cosine-clustered grid, which keeps
 * square-root edges and integrable 1/sqrt edge singularities accurate, and
 * the continuous part is normalized to 1 - atom mass.
 */
class Law {
public:
    using Density = std::function<double(double)>;

    Law(std::string name, Density density, double lower, double upper, double atom_mass = 0.0,
        double atom_location = 0.0);

    const std::string& name() const noexcept { return name_; }
    double density(double x) const { return density_(x); }
    double lower_edge() const noexcept { return lower_; }
    double upper_edge() const noexcept { return upper_; }
    double atom_mass() const noexcept { return atom_mass_; }
    double atom_location() const noexcept { return atom_location_; }

    /// Composite Simpson mass of the density on [lower - 0.5, upper + 0.5]
    /// (`points` must be odd) plus the atom mass.
    double mass(int points = 4001) const;

    double cdf(double x) const;

    std::vector<double> tabulate(std::span<const double> grid) const;

    /// Density samples requested at construction time, when any.
    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    void set_samples(std::vector<double> grid, std::vector<double> values);

private:
    std::string name_;
    Density density_;
    double lower_;
    double upper_;
    double atom_mass_;
    double atom_location_;
    std::vector<double> angles_;
    std::vector<double> cumulative_;
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// Support of the mode-2 law, located by bisection on the density floor and
/// refined where the selected root stops being real.
struct Support {
    double lower;
    double upper;
};
Support mode2_support(double rho, const ShapeRatios& c, double eta = 1e-6);

/// Mode-2 law with density (1/pi) Im m(t + i eta), sampled on `grid`.
Law lsd_density_mode2(std::span<const double> grid, double rho, const ShapeRatios& c, double eta = 1e-6);

/// (1 / 2 pi) sqrt([4 - x^2]^+).
double semicircle(double x);
Law semicircle_law();

struct MpEdges {
    double lower;
    double upper;
    double atom;
};
/// E+- = (sqrt(c1/(1-c3)) +- sqrt(c2/(1-c3)))^2 and the atom [1 - c1/c2]^+ at zero.
MpEdges mp_edges(const ShapeRatios& c);
/// Continuous part of the Marchenko-Pastur law of (1/varsigma^2) Tbar^T Tbar.
double mp_density(double x, const ShapeRatios& c);
Law mp_law(const ShapeRatios& c);

struct SpikePrediction {
    double location = 0.0;
    /// max(zeta, 0).
    double alignment = 0.0;
    bool detectable = false;
    /// Unclipped zeta.
    double zeta = 0.0;
};

/// Isolated eigenvalue and eigenvector alignment for the mode-2 unfolding.
SpikePrediction spike2(double rho, double beta_M, const ShapeRatios& c);

/// rho_T at which spike2's zeta crosses zero. Throws DomainError when
/// beta_M^4 <= c1 c2 / (1 - c3)^2 (no crossing exists).
double phase_transition_rho(double beta_M, const ShapeRatios& c);
/// Vertical asymptote of the phase-transition curve, (c1 c2 / (1 - c3)^2)^(1/4).
double phase_transition_asymptote(const ShapeRatios& c);

/// Spike of (1/varsigma^2) Tbar^T Tbar when z is known.
SpikePrediction spike_oracle(double beta_T, double beta_M, const ShapeRatios& c, double varsigma2);

/// Spike of the centered-and-scaled mode-3 Gram matrix.
SpikePrediction spike3(double varrho);

/// Standard normal CDF.
double normal_cdf(double x);

struct AccuracyPrediction {
    double accuracy;
    /// Set when a negative alignment was clamped to zero.
    bool clamped = false;
};

/// Phi(sqrt(zeta / (1 - zeta))); zeta >= 1 gives 1, zeta < 0 gives 0.5 with `clamped`.
AccuracyPrediction accuracy_from_alignment(double zeta);

/// Unclipped alignment of the multi-view unfolding estimator at finite (p, n, m).
double multiview_zeta(const MultiViewParams& p);

/// Oracle alignment for the multi-view model (h direction known).
SpikePrediction multiview_oracle(const MultiViewParams& p);

}  // namespace nested
