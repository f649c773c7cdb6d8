#include "bjlab/strip.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace bjlab::jet {

StripGrid::StripGrid(PeriodicGrid x_grid, std::size_t M) : x_(x_grid), M_(M) {
    if (M < 16) throw std::invalid_argument("StripGrid: M must be >= 16");
}

StripField::StripField(StripGrid grid) : grid_(grid), values_(grid.x_grid().size() * grid.q_points(), 0.0) {}

StripField::StripField(StripGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.x_grid().size() * grid_.q_points()) {
        throw std::invalid_argument("StripField: value count does not match grid");
    }
}

StripField StripField::sample(const StripGrid& grid, const std::function<double(double, double)>& f) {
    StripField out(grid);
    const auto& xg = grid.x_grid();
    for (std::size_t i = 0; i < xg.size(); ++i) {
        const double x = xg.node(i);
        for (std::size_t j = 0; j < grid.q_points(); ++j) out(i, j) = f(x, grid.q(j));
    }
    return out;
}

PeriodicField StripField::q_slice(std::size_t j) const {
    PeriodicField f(grid_.x_grid());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = (*this)(i, j);
    return f;
}

void StripField::set_q_slice(std::size_t j, const PeriodicField& f) {
    for (std::size_t i = 0; i < f.size(); ++i) (*this)(i, j) = f[i];
}

double StripField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool StripField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_m(int m) {
    if (m != 1 && m != 2) throw std::invalid_argument("m must be 1 or 2");
}

using Complex = std::complex<double>;

// Tridiagonal solve (Thomas) with real coefficients and complex right-hand side.
void thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper, std::vector<Complex>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(diag[i - 1]) < 1e-300) throw std::runtime_error("degenerate system");
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (std::abs(diag[n - 1]) < 1e-300) throw std::runtime_error("degenerate system");
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

StripField solve_elliptic(int m, const StripField& omega) {
    require_m(m);
    const StripGrid& grid = omega.grid();
    const PeriodicGrid& xg = grid.x_grid();
    const std::size_t M = grid.M();
    const std::size_t nk = xg.size() / 2 + 1;
    const double dq = grid.dq();
    const double b = 4.0 + 2.0 * m;

    // Spectra of every q row.
    std::vector<spectral::Spectrum> w_hat(M + 1);
    for (std::size_t j = 0; j <= M; ++j) w_hat[j] = spectral::forward(omega.q_slice(j));

    std::vector<spectral::Spectrum> phi_hat(M + 1, spectral::Spectrum(nk, 0.0));
    std::vector<double> lower(M), diag(M), upper(M);
    std::vector<Complex> rhs(M);
    for (std::size_t k = 0; k < nk; ++k) {
        const double kk = xg.wavenumber(k);
        const double k2 = kk * kk;
        // Unknowns phi_0 .. phi_{M-1}; phi_M = 0.
        for (std::size_t i = 1; i < M; ++i) {
            const double q = grid.q(i);
            lower[i] = 4.0 * q / (dq * dq) - b / (2.0 * dq);
            diag[i] = -8.0 * q / (dq * dq) - k2;
            upper[i] = 4.0 * q / (dq * dq) + b / (2.0 * dq);
            rhs[i] = -w_hat[i][k];
        }
        upper[M - 1] = 0.0;
        // q = 0: b * (-3 phi_0 + 4 phi_1 - phi_2) / (2 dq) - k^2 phi_0 = -omega_0.
        double d0 = -3.0 * b / (2.0 * dq) - k2;
        double u0 = 4.0 * b / (2.0 * dq);
        const double e0 = -b / (2.0 * dq);
        Complex r0 = -w_hat[0][k];
        // Eliminate the phi_2 entry with row 1 to keep the system tridiagonal.
        const double f = e0 / upper[1];
        d0 -= f * lower[1];
        u0 -= f * diag[1];
        r0 -= f * rhs[1];
        lower[0] = 0.0;
        diag[0] = d0;
        upper[0] = u0;
        rhs[0] = r0;

        thomas(lower, diag, upper, rhs);
        for (std::size_t j = 0; j < M; ++j) phi_hat[j][k] = rhs[j];
    }

    StripField phi(grid);
    for (std::size_t j = 0; j < M; ++j) phi.set_q_slice(j, spectral::inverse(xg, phi_hat[j]));
    return phi;
}

double elliptic_residual(int m, const StripField& phi, const StripField& omega) {
    require_m(m);
    const StripGrid& grid = phi.grid();
    const std::size_t M = grid.M();
    const double dq = grid.dq();
    const double b = 4.0 + 2.0 * m;
    double worst = 0.0;
    for (std::size_t j = 1; j < M; ++j) {
        const PeriodicField dxx = spectral::second_derivative(phi.q_slice(j));
        const double q = grid.q(j);
        for (std::size_t i = 0; i < dxx.size(); ++i) {
            const double dqq = (phi(i, j + 1) - 2.0 * phi(i, j) + phi(i, j - 1)) / (dq * dq);
            const double d1 = (phi(i, j + 1) - phi(i, j - 1)) / (2.0 * dq);
            const double lhs = -(dxx[i] + 4.0 * q * dqq + b * d1);
            worst = std::max(worst, std::abs(lhs - omega(i, j)));
        }
    }
    return worst;
}

JetRecord extract_jets(const StripField& phi, const StripField& omega, int m, JetRoute route) {
    require_m(m);
    const StripGrid& grid = phi.grid();
    const std::size_t M = grid.M();
    const double dq = grid.dq();
    const PeriodicGrid& xg = grid.x_grid();

    PeriodicField phi1(xg), phi2(xg);
    const PeriodicField wb = omega.q_slice(M);
    const PeriodicField dxx_top = spectral::second_derivative(phi.q_slice(M));
    for (std::size_t i = 0; i < xg.size(); ++i) {
        phi1[i] = (25.0 * phi(i, M) - 48.0 * phi(i, M - 1) + 36.0 * phi(i, M - 2) - 16.0 * phi(i, M - 3) +
                   3.0 * phi(i, M - 4)) /
                  (12.0 * dq);
        if (route == JetRoute::pde) {
            // phi(x,1) = 0 makes the d_x^2 term vanish for solver output.
            phi2[i] = (-wb[i] - dxx_top[i] - (4.0 + 2.0 * m) * phi1[i]) / 4.0;
        } else {
            phi2[i] = (2.0 * phi(i, M) - 5.0 * phi(i, M - 1) + 4.0 * phi(i, M - 2) - phi(i, M - 3)) / (dq * dq);
        }
    }
    return JetRecord{std::move(phi1), std::move(phi2), wb, m};
}

double jet_relation_residual(const JetRecord& jets) {
    double worst = 0.0;
    for (std::size_t i = 0; i < jets.phi1.size(); ++i) {
        const double r = jets.omega_boundary[i] + 4.0 * jets.phi2[i] + 2.0 * (jets.m + 2) * jets.phi1[i];
        worst = std::max(worst, std::abs(r));
    }
    return worst / std::max(jets.omega_boundary.sup_norm(), 1e-300);
}

double closure_residual(const JetRecord& jets, double a_jet) {
    double worst = 0.0;
    for (std::size_t i = 0; i < jets.phi1.size(); ++i) {
        worst = std::max(worst, std::abs(jets.phi2[i] - a_jet * jets.phi1[i]));
    }
    return worst / std::max(jets.phi1.sup_norm(), 1e-300);
}

std::pair<StripField, StripField> compute_velocities(const StripField& phi, int m) {
    require_m(m);
    const StripGrid& grid = phi.grid();
    const std::size_t M = grid.M();
    const double dq = grid.dq();
    StripField v(grid), g(grid);
    for (std::size_t j = 0; j <= M; ++j) v.set_q_slice(j, spectral::derivative(phi.q_slice(j)));
    for (std::size_t i = 0; i < grid.x_grid().size(); ++i) {
        for (std::size_t j = 0; j <= M; ++j) {
            double dphi;
            if (j == 0) {
                dphi = (-3.0 * phi(i, 0) + 4.0 * phi(i, 1) - phi(i, 2)) / (2.0 * dq);
            } else if (j == M) {
                dphi = (3.0 * phi(i, M) - 4.0 * phi(i, M - 1) + phi(i, M - 2)) / (2.0 * dq);
            } else {
                dphi = (phi(i, j + 1) - phi(i, j - 1)) / (2.0 * dq);
            }
            g(i, j) = m * phi(i, j) + 2.0 * grid.q(j) * dphi;
        }
    }
    return {std::move(v), std::move(g)};
}

// ---- identity catalog ------------------------------------------------------

namespace {

std::vector<CatalogFunction> build_catalog() {
    using std::cos;
    using std::exp;
    using std::sin;
    std::vector<CatalogFunction> cat;
    auto zero = [](double, double) { return 0.0; };

    // phi = q; psi = r^3
    cat.push_back({"q",
                   [](double, double q) { return q; }, zero, [](double, double) { return 1.0; }, zero,
                   [](double, double r) { return r * r * r; }, zero,
                   [](double, double r) { return 3.0 * r * r; }, [](double, double r) { return 6.0 * r; }});

    // phi = q^2; psi = r^5
    cat.push_back({"q_squared",
                   [](double, double q) { return q * q; }, zero, [](double, double q) { return 2.0 * q; },
                   [](double, double) { return 2.0; },
                   [](double, double r) { return std::pow(r, 5); }, zero,
                   [](double, double r) { return 5.0 * std::pow(r, 4); },
                   [](double, double r) { return 20.0 * r * r * r; }});

    // phi = q sin z; psi = r^3 sin z
    cat.push_back({"q_sin_z",
                   [](double z, double q) { return q * sin(z); }, [](double z, double q) { return -q * sin(z); },
                   [](double z, double) { return sin(z); }, zero,
                   [](double z, double r) { return r * r * r * sin(z); },
                   [](double z, double r) { return -r * r * r * sin(z); },
                   [](double z, double r) { return 3.0 * r * r * sin(z); },
                   [](double z, double r) { return 6.0 * r * sin(z); }});

    // phi = (1 - q) sin z; psi = (r - r^3) sin z
    cat.push_back({"one_minus_q_sin_z",
                   [](double z, double q) { return (1.0 - q) * sin(z); },
                   [](double z, double q) { return -(1.0 - q) * sin(z); },
                   [](double z, double) { return -sin(z); }, zero,
                   [](double z, double r) { return (r - r * r * r) * sin(z); },
                   [](double z, double r) { return -(r - r * r * r) * sin(z); },
                   [](double z, double r) { return (1.0 - 3.0 * r * r) * sin(z); },
                   [](double z, double r) { return -6.0 * r * sin(z); }});

    // phi = q^3 cos 2z; psi = r^7 cos 2z
    cat.push_back({"q_cubed_cos_2z",
                   [](double z, double q) { return q * q * q * cos(2.0 * z); },
                   [](double z, double q) { return -4.0 * q * q * q * cos(2.0 * z); },
                   [](double z, double q) { return 3.0 * q * q * cos(2.0 * z); },
                   [](double z, double q) { return 6.0 * q * cos(2.0 * z); },
                   [](double z, double r) { return std::pow(r, 7) * cos(2.0 * z); },
                   [](double z, double r) { return -4.0 * std::pow(r, 7) * cos(2.0 * z); },
                   [](double z, double r) { return 7.0 * std::pow(r, 6) * cos(2.0 * z); },
                   [](double z, double r) { return 42.0 * std::pow(r, 5) * cos(2.0 * z); }});

    // phi = e^q cos z; psi = r e^{r^2} cos z
    cat.push_back({"exp_q_cos_z",
                   [](double z, double q) { return exp(q) * cos(z); },
                   [](double z, double q) { return -exp(q) * cos(z); },
                   [](double z, double q) { return exp(q) * cos(z); },
                   [](double z, double q) { return exp(q) * cos(z); },
                   [](double z, double r) { return r * exp(r * r) * cos(z); },
                   [](double z, double r) { return -r * exp(r * r) * cos(z); },
                   [](double z, double r) { return (1.0 + 2.0 * r * r) * exp(r * r) * cos(z); },
                   [](double z, double r) { return (6.0 * r + 4.0 * r * r * r) * exp(r * r) * cos(z); }});

    // phi = sin(q) sin z; psi = r sin(r^2) sin z
    cat.push_back({"sin_q_sin_z",
                   [](double z, double q) { return sin(q) * sin(z); },
                   [](double z, double q) { return -sin(q) * sin(z); },
                   [](double z, double q) { return cos(q) * sin(z); },
                   [](double z, double q) { return -sin(q) * sin(z); },
                   [](double z, double r) { return r * sin(r * r) * sin(z); },
                   [](double z, double r) { return -r * sin(r * r) * sin(z); },
                   [](double z, double r) { return (sin(r * r) + 2.0 * r * r * cos(r * r)) * sin(z); },
                   [](double z, double r) {
                       return (6.0 * r * cos(r * r) - 4.0 * r * r * r * sin(r * r)) * sin(z);
                   }});
    return cat;
}

}  // namespace

const std::vector<CatalogFunction>& identity_catalog() {
    static const std::vector<CatalogFunction> cat = build_catalog();
    return cat;
}

const CatalogFunction& catalog_function(std::string_view id) {
    for (const auto& f : identity_catalog()) {
        if (f.id == id) return f;
    }
    throw std::invalid_argument("unknown test function: " + std::string(id));
}

OperatorSides evaluate_operator_sides(int m, const CatalogFunction& f, double z, double r) {
    require_m(m);
    const double q = r * r;
    const double psi = f.psi(z, r);
    const double psi_r = f.psi_r(z, r);
    const double psi_rr = f.psi_rr(z, r);
    const double psi_zz = f.psi_zz(z, r);

    OperatorSides s;
    if (m == 1) {
        s.cylindrical = -(psi_zz + psi_rr) / r;
    } else {
        s.cylindrical = -(psi_zz + psi_rr + psi_r / r - psi / (r * r)) / r;
    }
    const double phi_q = f.phi_q(z, q);
    const double phi_qq = f.phi_qq(z, q);
    const double phi_zz = f.phi_zz(z, q);
    s.strip = -(phi_zz + 4.0 * q * phi_qq + (4.0 + 2.0 * m) * phi_q);

    // v = phi_z, g = m phi + 2 q phi_q.
    const double dz_v = phi_zz;
    const double dq_g = m * phi_q + 2.0 * phi_q + 2.0 * q * phi_qq;
    s.vorticity_chain = r * (-dz_v - 2.0 * dq_g);

    if (m == 2) {
        // v^r = -psi_z, v^z = (1/r) d_r (r psi).
        const double dz_vr = -psi_zz;
        const double dr_vz = psi_r / r - psi / (r * r) + psi_rr;
        s.vorticity_cyl = dz_vr - dr_vz;
    } else {
        s.vorticity_cyl = -(psi_zz + psi_rr);
    }
    return s;
}

double operator_identity_check(int m, std::string_view test_id) {
    require_m(m);
    const CatalogFunction& f = catalog_function(test_id);
    constexpr int kZ = 16;
    constexpr int kR = 16;
    double worst = 0.0;
    for (int iz = 0; iz < kZ; ++iz) {
        const double z = 2.0 * std::numbers::pi * iz / kZ;
        for (int ir = 1; ir <= kR; ++ir) {
            const double r = static_cast<double>(ir) / kR;
            const OperatorSides s = evaluate_operator_sides(m, f, z, r);
            worst = std::max({worst, std::abs(s.cylindrical - s.strip), std::abs(s.vorticity_chain - r * s.strip),
                              std::abs(s.vorticity_cyl - r * s.strip)});
        }
    }
    return worst;
}

// ---- strip I/O -------------------------------------------------------------

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    if (!is) throw std::runtime_error("strip file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_strip(const std::filesystem::path& path, const StripField& f, std::string_view name, int m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const auto& g = f.grid();
    put_u64(os, g.x_grid().size());
    put_u64(os, g.M());
    put_f64(os, g.x_grid().period());
    for (double v : f.values()) put_f64(os, v);
    if (!os) throw std::runtime_error("write failed: " + path.string());

    nlohmann::json meta = {
        {"format", "bjlab-strip"},
        {"version", 1},
        {"byte_order", "little-endian"},
        {"layout", "row-major, x index outer, q index inner; header uint64 n, uint64 M, float64 L"},
        {"n", g.x_grid().size()},
        {"M", g.M()},
        {"L", g.x_grid().period()},
        {"name", std::string(name)},
        {"m", m},
    };
    std::ofstream js(path.string() + ".json");
    js << meta.dump(2) << '\n';
    if (!js) throw std::runtime_error("write failed: " + path.string() + ".json");
}

StripField read_strip(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    const auto n = get_u64(is);
    const auto M = get_u64(is);
    const double L = get_f64(is);
    StripGrid grid(PeriodicGrid(n, L), M);
    std::vector<double> vals(n * (M + 1));
    for (double& v : vals) v = get_f64(is);
    return StripField(grid, std::move(vals));
}

}  // namespace bjlab::jet
