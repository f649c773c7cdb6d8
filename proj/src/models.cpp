#include "bjlab/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bjlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::pair<ModelKind, std::string_view> kKindNames[] = {
    {ModelKind::CLM, "CLM"},       {ModelKind::DeGregorio, "DeGregorio"}, {ModelKind::CCF, "CCF"},
    {ModelKind::Okamoto, "Okamoto"}, {ModelKind::HouLuo, "HouLuo"},       {ModelKind::CKY, "CKY"},
    {ModelKind::Q0, "Q0"},
};

}  // namespace

std::string_view to_string(ModelKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

ModelSpec ModelSpec::cky(double truncation_X) {
    if (!(truncation_X > 0.0)) throw std::invalid_argument("CKY truncation_X must be positive");
    return ModelSpec(models::Cky{truncation_X});
}

ModelSpec ModelSpec::q0(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("Q0 coefficient c must be positive");
    return ModelSpec(models::Q0{c});
}

ModelKind ModelSpec::kind() const {
    return std::visit(Overloaded{
                          [](const models::Clm&) { return ModelKind::CLM; },
                          [](const models::DeGregorio&) { return ModelKind::DeGregorio; },
                          [](const models::Ccf&) { return ModelKind::CCF; },
                          [](const models::Okamoto&) { return ModelKind::Okamoto; },
                          [](const models::HouLuo&) { return ModelKind::HouLuo; },
                          [](const models::Cky&) { return ModelKind::CKY; },
                          [](const models::Q0&) { return ModelKind::Q0; },
                      },
                      model_);
}

bool ModelSpec::has_theta() const {
    const auto k = kind();
    return k == ModelKind::HouLuo || k == ModelKind::CKY || k == ModelKind::Q0;
}

std::optional<double> ModelSpec::local_coefficient() const {
    if (const auto* q = std::get_if<models::Q0>(&model_)) return q->c;
    return std::nullopt;
}

double closure_coefficient(const ClosureParams& p) {
    if (p.m != 1 && p.m != 2) throw std::invalid_argument("closure m must be 1 or 2");
    const double denom = 2.0 * p.a_jet + static_cast<double>(p.m) + 2.0;
    if (!(denom > 0.0)) throw std::domain_error("positivity condition violated");
    return 1.0 / denom;
}

bool EvolutionState::all_finite() const {
    return omega.all_finite() && (!theta || theta->all_finite()) && std::isfinite(time);
}

void check_consistent(const ModelSpec& model, const EvolutionState& s) {
    if (model.has_theta() != s.theta.has_value()) {
        throw std::invalid_argument(std::string("state theta presence does not match model ") +
                                    std::string(to_string(model.kind())));
    }
    if (s.theta && !(s.theta->grid() == s.omega.grid())) {
        throw std::invalid_argument("omega and theta live on different grids");
    }
}

namespace {

// -u(x) = x * int_{|x|}^{X} omega(y)/y dy for |x| <= X. X must sit on a node.
PeriodicField cky_velocity(const PeriodicField& omega, double X) {
    const auto& g = omega.grid();
    const std::size_t n = g.size();
    const double h = g.spacing();
    if (X > 0.5 * g.period() * (1.0 + 1e-12)) throw std::invalid_argument("CKY truncation_X exceeds L/2");
    const double steps = X / h;
    const auto p = static_cast<std::size_t>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(p)) > 1e-9 * std::max(1.0, steps)) {
        throw std::invalid_argument("CKY truncation_X must coincide with a grid node");
    }
    if (p < 4) throw std::invalid_argument("CKY truncation needs at least 4 grid intervals");

    const std::size_t origin = g.origin_index();
    auto w = [&](std::size_t i) { return omega[(origin + i) % n]; };

    // omega(y)/y on nodes 0..p of [0, X]; the limit at y = 0 from a one-sided
    // fourth-order derivative so that only samples on [0, X] are used.
    std::vector<double> ratio(p + 1);
    ratio[0] = (-25.0 * w(0) + 48.0 * w(1) - 36.0 * w(2) + 16.0 * w(3) - 3.0 * w(4)) / (12.0 * h);
    for (std::size_t i = 1; i <= p; ++i) ratio[i] = w(i) / (static_cast<double>(i) * h);

    // Per-interval integrals of the cubic through four neighbouring nodes.
    std::vector<double> panel(p);
    for (std::size_t i = 0; i < p; ++i) {
        if (i == 0) {
            panel[i] = h / 24.0 * (9.0 * ratio[0] + 19.0 * ratio[1] - 5.0 * ratio[2] + ratio[3]);
        } else if (i == p - 1) {
            panel[i] = h / 24.0 * (ratio[p - 3] - 5.0 * ratio[p - 2] + 19.0 * ratio[p - 1] + 9.0 * ratio[p]);
        } else {
            panel[i] = h / 24.0 * (-ratio[i - 1] + 13.0 * ratio[i] + 13.0 * ratio[i + 1] - ratio[i + 2]);
        }
    }

    PeriodicField u(g);
    double tail = 0.0;  // int_{x_i}^{X}
    for (std::size_t i = p + 1; i-- > 0;) {
        if (i < p) tail += panel[i];
        const double x = static_cast<double>(i) * h;
        u[(origin + i) % n] = -x * tail;
        if (i > 0) u[(origin + n - i) % n] = x * tail;
    }
    return u;
}

PeriodicField maybe_dealias(PeriodicField f, const RhsOptions& opts) {
    return opts.dealias ? spectral::dealias(f) : f;
}

}  // namespace

PeriodicField biot_savart(const ModelSpec& model, const PeriodicField& omega) {
    using spectral::antiderivative_zero_mean;
    using spectral::hilbert_transform;
    return std::visit(Overloaded{
                          [&](const models::Q0& q) { return (-q.c) * omega; },
                          [&](const models::Ccf&) { return hilbert_transform(omega); },
                          [&](const models::Cky& c) { return cky_velocity(omega, c.truncation_X); },
                          [&](const auto&) { return antiderivative_zero_mean(hilbert_transform(omega)); },
                      },
                      model.variant());
}

StateRate rhs(const ModelSpec& model, const EvolutionState& s, const RhsOptions& opts) {
    check_consistent(model, s);
    using spectral::derivative;
    const PeriodicField& w = s.omega;

    auto stretching = [&](double transport_weight) {
        // u_x = H omega exactly; u only when transported.
        const PeriodicField ux = spectral::hilbert_transform(w);
        PeriodicField out = maybe_dealias(ux * w, opts);
        if (transport_weight != 0.0) {
            const PeriodicField u = spectral::antiderivative_zero_mean(ux);
            out -= transport_weight * maybe_dealias(u * derivative(w), opts);
        }
        return StateRate{std::move(out), std::nullopt};
    };

    auto boussinesq_like = [&]() {
        const PeriodicField u = biot_savart(model, w);
        const PeriodicField theta_x = derivative(*s.theta);
        PeriodicField wdot = theta_x - maybe_dealias(u * derivative(w), opts);
        PeriodicField tdot = -1.0 * maybe_dealias(u * theta_x, opts);
        return StateRate{std::move(wdot), std::move(tdot)};
    };

    return std::visit(Overloaded{
                          [&](const models::Clm&) { return stretching(0.0); },
                          [&](const models::DeGregorio&) { return stretching(1.0); },
                          [&](const models::Okamoto& o) { return stretching(o.a_ok); },
                          [&](const models::Ccf&) {
                              const PeriodicField u = spectral::hilbert_transform(w);
                              return StateRate{-1.0 * maybe_dealias(u * derivative(w), opts), std::nullopt};
                          },
                          [&](const models::HouLuo&) { return boussinesq_like(); },
                          [&](const models::Cky&) { return boussinesq_like(); },
                          [&](const models::Q0&) { return boussinesq_like(); },
                      },
                      model.variant());
}

PeriodicField reconstruct_rho(const PeriodicField& theta) {
    PeriodicField rho(theta.grid());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double t = theta[j];
        rho[j] = t >= -1e-12 ? std::sqrt(std::max(t, 0.0)) : std::nan("");
    }
    return rho;
}

}  // namespace bjlab
