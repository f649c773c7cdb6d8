#include "bjlab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bjlab {

PeriodicGrid::PeriodicGrid(std::size_t n_points, double period_L) : n_(n_points), L_(period_L) {
    if (n_points < 8 || n_points % 2 != 0) {
        throw std::invalid_argument("PeriodicGrid: n_points must be even and >= 8, got " +
                                    std::to_string(n_points));
    }
    if (!(period_L > 0.0) || !std::isfinite(period_L)) {
        throw std::invalid_argument("PeriodicGrid: period_L must be positive and finite");
    }
}

double PeriodicGrid::node(std::size_t j) const {
    return -0.5 * L_ + static_cast<double>(j) * L_ / static_cast<double>(n_);
}

std::vector<double> PeriodicGrid::nodes() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
    return x;
}

double PeriodicGrid::wavenumber(std::size_t k) const {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / L_;
}

PeriodicField::PeriodicField(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("PeriodicField: values length " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(grid_.size()));
    }
}

PeriodicField::PeriodicField(PeriodicGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

PeriodicField PeriodicField::sample(const PeriodicGrid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.node(j));
    return PeriodicField(grid, std::move(v));
}

PeriodicField PeriodicField::constant(const PeriodicGrid& grid, double value) {
    return PeriodicField(grid, std::vector<double>(grid.size(), value));
}

double PeriodicField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double PeriodicField::mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
}

double PeriodicField::integral() const { return mean() * grid_.period(); }

bool PeriodicField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_same_grid(const PeriodicField& a, const PeriodicField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("PeriodicField: grid mismatch");
}

}  // namespace

PeriodicField& PeriodicField::operator+=(const PeriodicField& rhs) {
    require_same_grid(*this, rhs);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += rhs.values_[j];
    return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& rhs) {
    require_same_grid(*this, rhs);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= rhs.values_[j];
    return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

PeriodicField operator+(PeriodicField lhs, const PeriodicField& rhs) { return lhs += rhs; }
PeriodicField operator-(PeriodicField lhs, const PeriodicField& rhs) { return lhs -= rhs; }
PeriodicField operator*(double s, PeriodicField f) { return f *= s; }

PeriodicField operator*(const PeriodicField& a, const PeriodicField& b) {
    require_same_grid(a, b);
    PeriodicField out(a.grid());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
    return out;
}

PeriodicField axpy(const PeriodicField& a, double s, const PeriodicField& b) {
    require_same_grid(a, b);
    PeriodicField out(a.grid());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + s * b[j];
    return out;
}

namespace spectral {
namespace {

// FFTW planning is not thread-safe; execution on new arrays is. Plans are
// created once per size under a lock and executed with the new-array API.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.r2c);
            fftw_destroy_plan(p.c2r);
        }
    }

    PlanPair get(std::size_t n) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        const int ni = static_cast<int>(n);
        std::vector<double> real(n);
        std::vector<fftw_complex> cplx(n / 2 + 1);
        PlanPair p;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        p.r2c = fftw_plan_dft_r2c_1d(ni, real.data(), cplx.data(), flags);
        p.c2r = fftw_plan_dft_c2r_1d(ni, cplx.data(), real.data(), flags | FFTW_DESTROY_INPUT);
        if (p.r2c == nullptr || p.c2r == nullptr) throw std::runtime_error("FFTW planning failed");
        plans_.emplace(n, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

template <typename Multiplier>
PeriodicField apply_multiplier(const PeriodicField& f, Multiplier&& mult) {
    Spectrum s = forward(f);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] *= mult(k);
    return inverse(f.grid(), s);
}

}  // namespace

Spectrum forward(const PeriodicField& f) {
    const std::size_t n = f.size();
    auto plan = plan_cache().get(n).r2c;
    std::vector<double> in(f.values().begin(), f.values().end());
    Spectrum out(n / 2 + 1);
    fftw_execute_dft_r2c(plan, in.data(), as_fftw(out.data()));
    return out;
}

PeriodicField inverse(const PeriodicGrid& grid, const Spectrum& spectrum) {
    const std::size_t n = grid.size();
    if (spectrum.size() != n / 2 + 1) throw std::invalid_argument("spectral::inverse: spectrum size mismatch");
    auto plan = plan_cache().get(n).c2r;
    Spectrum work = spectrum;
    // c2r reads only the real parts of the DC and Nyquist bins.
    std::vector<double> out(n);
    fftw_execute_dft_c2r(plan, as_fftw(work.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return PeriodicField(grid, std::move(out));
}

PeriodicField derivative(const PeriodicField& f) {
    const auto& g = f.grid();
    const std::size_t nyq = g.size() / 2;
    return apply_multiplier(f, [&](std::size_t k) -> std::complex<double> {
        if (k == nyq) return 0.0;
        return {0.0, g.wavenumber(k)};
    });
}

PeriodicField second_derivative(const PeriodicField& f) {
    const auto& g = f.grid();
    return apply_multiplier(f, [&](std::size_t k) -> std::complex<double> {
        const double kk = g.wavenumber(k);
        return -kk * kk;
    });
}

PeriodicField hilbert_transform(const PeriodicField& f) {
    const std::size_t nyq = f.grid().size() / 2;
    return apply_multiplier(f, [&](std::size_t k) -> std::complex<double> {
        if (k == 0 || k == nyq) return 0.0;
        return {0.0, -1.0};
    });
}

PeriodicField antiderivative_zero_mean(const PeriodicField& f) {
    const double sup = f.sup_norm();
    if (std::abs(f.mean()) > 1e-12 * sup) throw std::domain_error("no periodic antiderivative");
    const auto& g = f.grid();
    const std::size_t nyq = g.size() / 2;
    return apply_multiplier(f, [&](std::size_t k) -> std::complex<double> {
        if (k == 0 || k == nyq) return 0.0;
        return {0.0, -1.0 / g.wavenumber(k)};
    });
}

PeriodicField dealias(const PeriodicField& f) {
    const std::size_t n = f.grid().size();
    return apply_multiplier(f, [&](std::size_t k) -> std::complex<double> {
        return 3 * k > n ? 0.0 : 1.0;
    });
}

double tail_energy_fraction(const PeriodicField& f) {
    const std::size_t n = f.grid().size();
    const Spectrum s = forward(f);
    const std::size_t nyq = n / 2;
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double weight = (k == 0 || k == nyq) ? 1.0 : 2.0;
        const double e = weight * std::norm(s[k]);
        total += e;
        if (3 * k >= n) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace spectral

double composite_simpson(std::span<const double> samples, double h) {
    const std::size_t intervals = samples.size() - 1;
    if (samples.size() < 2) return 0.0;
    if (intervals == 1) return 0.5 * h * (samples[0] + samples[1]);
    if (intervals == 3) {
        return 3.0 * h / 8.0 * (samples[0] + 3.0 * samples[1] + 3.0 * samples[2] + samples[3]);
    }
    // Even part with Simpson; an odd interval count leaves a 3/8 panel at the end.
    const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    double acc = samples[0] + samples[simpson_end];
    for (std::size_t i = 1; i < simpson_end; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * samples[i];
    double total = h / 3.0 * acc;
    if (simpson_end != intervals) {
        const std::size_t s = simpson_end;
        total += 3.0 * h / 8.0 * (samples[s] + 3.0 * samples[s + 1] + 3.0 * samples[s + 2] + samples[s + 3]);
    }
    return total;
}

namespace {

double weighted_integral_impl(const PeriodicField& f, SingularWeight weight) {
    const auto& g = f.grid();
    const std::size_t n = g.size();
    const std::size_t origin = g.origin_index();
    const double slope0 = spectral::derivative(f)[origin];

    // Nodes origin..n-1 lie in [0, L/2); the node at L/2 is node 0 by periodicity.
    std::vector<double> integrand(n / 2 + 1);
    for (std::size_t i = 0; i <= n / 2; ++i) {
        const std::size_t j = (origin + i) % n;
        const double x = static_cast<double>(i) * g.spacing();
        double q = (i == 0) ? slope0 : f[j] / x;
        integrand[i] = weight == SingularWeight::inv_x ? q : q * q;
    }
    return composite_simpson(integrand, g.spacing());
}

}  // namespace

double half_period_weighted_integral(const PeriodicField& f, SingularWeight weight) {
    const double at_origin = f[f.grid().origin_index()];
    if (std::abs(at_origin) > 1e-10 * f.sup_norm()) throw std::domain_error("singular integrand");
    return weighted_integral_impl(f, weight);
}

double half_period_weighted_integral_unchecked(const PeriodicField& f, SingularWeight weight) {
    return weighted_integral_impl(f, weight);
}

}  // namespace bjlab
