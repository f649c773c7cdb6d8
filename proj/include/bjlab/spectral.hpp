#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bjlab {

/// Uniform grid on [-L/2, L/2) with node j at x_j = -L/2 + j*L/n.
/// Node 0 is x = -L/2 (identified with L/2) and node n/2 is x = 0.
class PeriodicGrid {
public:
    PeriodicGrid(std::size_t n_points, double period_L);

    std::size_t size() const { return n_; }
    double period() const { return L_; }
    double spacing() const { return L_ / static_cast<double>(n_); }
    double node(std::size_t j) const;
    std::vector<double> nodes() const;

    /// Index of the node reflected through x = 0 (also the reflection through L/2).
    std::size_t mirror(std::size_t j) const { return (n_ - j) % n_; }
    std::size_t origin_index() const { return n_ / 2; }

    /// Angular wavenumber 2*pi*k/L of rfft bin k.
    double wavenumber(std::size_t k) const;

    bool operator==(const PeriodicGrid& other) const = default;

private:
    std::size_t n_;
    double L_;
};

/// Samples of an L-periodic function on a PeriodicGrid.
class PeriodicField {
public:
    PeriodicField(PeriodicGrid grid, std::vector<double> values);
    explicit PeriodicField(PeriodicGrid grid);  // zero field

    static PeriodicField sample(const PeriodicGrid& grid, const std::function<double(double)>& f);
    static PeriodicField constant(const PeriodicGrid& grid, double value);

    const PeriodicGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }
    double& operator[](std::size_t j) { return values_[j]; }

    double sup_norm() const;
    double mean() const;
    /// Periodic trapezoid rule over one period (spectrally accurate).
    double integral() const;
    bool all_finite() const;

    PeriodicField& operator+=(const PeriodicField& rhs);
    PeriodicField& operator-=(const PeriodicField& rhs);
    PeriodicField& operator*=(double s);

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
};

PeriodicField operator+(PeriodicField lhs, const PeriodicField& rhs);
PeriodicField operator-(PeriodicField lhs, const PeriodicField& rhs);
PeriodicField operator*(double s, PeriodicField f);
/// Pointwise product.
PeriodicField operator*(const PeriodicField& a, const PeriodicField& b);
/// a + s*b without temporaries.
PeriodicField axpy(const PeriodicField& a, double s, const PeriodicField& b);

namespace spectral {

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized real-to-complex transform, n/2+1 bins.
Spectrum forward(const PeriodicField& f);
/// Inverse of forward (includes the 1/n normalization).
PeriodicField inverse(const PeriodicGrid& grid, const Spectrum& spectrum);

/// Derivative of the trigonometric interpolant; the Nyquist mode is dropped.
PeriodicField derivative(const PeriodicField& f);
/// Second derivative; the Nyquist mode keeps its -k^2 multiplier.
PeriodicField second_derivative(const PeriodicField& f);

/// Fourier multiplier -i*sign(k); mode 0 maps to 0, Nyquist maps to 0.
PeriodicField hilbert_transform(const PeriodicField& f);

/// Unique zero-mean periodic antiderivative.
/// Throws std::domain_error("no periodic antiderivative") if |mean(f)| > 1e-12*max|f|.
PeriodicField antiderivative_zero_mean(const PeriodicField& f);

/// 2/3-rule filter: zeroes every bin with k > n/3.
PeriodicField dealias(const PeriodicField& f);

/// Fraction of spectral energy carried by bins k >= n/3 (the top third of the spectrum).
/// Returns 0 for the zero field.
double tail_energy_fraction(const PeriodicField& f);

}  // namespace spectral

enum class SingularWeight { inv_x, inv_x_squared };

/// Integral over [0, L/2] of f(x)/x (inv_x) or f(x)^2/x^2 (inv_x_squared).
///
/// The removable singularity at x = 0 is filled with f'(0) (spectral
/// derivative). The nodes x_{n/2}, ..., x_n (= L/2) are integrated with
/// composite Simpson, finishing with a Simpson 3/8 panel when the number of
/// intervals is odd, so the rule is fourth order for any even n >= 8.
///
/// Throws std::domain_error("singular integrand") if |f(0)| > 1e-10*max|f|.
double half_period_weighted_integral(const PeriodicField& f, SingularWeight weight);

/// Same rule without the f(0) precondition; f(0) is ignored and replaced by the
/// derivative limit. Used by diagnostics which must not abort a run.
double half_period_weighted_integral_unchecked(const PeriodicField& f, SingularWeight weight);

/// Fourth-order composite rule (Simpson, 3/8 tail when needed) on uniform samples.
double composite_simpson(std::span<const double> samples, double h);

}  // namespace bjlab
