#include "qdeficit/profile.hpp"

#include <cmath>
#include <sstream>

#include "qdeficit/error.hpp"

namespace qdeficit {

namespace {

class RhoModel : public ProfileModel {
public:
    explicit RhoModel(RhoExpression expr) : expr_(std::move(expr)) {}

    Jet radial_jet(double r, int order) const override {
        Jet rho(r * r, order);
        if (order >= 1) rho[1] = 2.0 * r;
        if (order >= 2) rho[2] = 1.0;
        return expr_(rho);
    }

    double laplacian_power(double r, int n, int m) const override {
        const double rho0 = r * r;
        Jet a = expr_(Jet::variable(rho0, 2 * m));
        for (int i = 0; i < m; ++i) a = rho_laplacian(a, rho0, n);
        return a.value();
    }

private:
    RhoExpression expr_;
};

class DilatedModel : public ProfileModel {
public:
    DilatedModel(std::shared_ptr<const ProfileModel> base, double lambda) : base_(std::move(base)), lambda_(lambda) {}

    Jet radial_jet(double r, int order) const override {
        Jet j = base_->radial_jet(lambda_ * r, order);
        double s = 1.0;
        for (int k = 0; k <= order; ++k, s *= lambda_) j[k] *= s;
        return j;
    }

    double laplacian_power(double r, int n, int m) const override {
        return std::pow(lambda_, 2 * m) * base_->laplacian_power(lambda_ * r, n, m);
    }

private:
    std::shared_ptr<const ProfileModel> base_;
    double lambda_;
};

}  // namespace

RadialProfile::RadialProfile(std::shared_ptr<const ProfileModel> model, TailDescriptor tail, std::string family,
                             double parameter)
    : model_(std::move(model)), tail_(tail), family_(std::move(family)), parameter_(parameter) {
    require(model_ != nullptr, ErrorCode::invalid_argument, "profile needs a model");
}

Jet RadialProfile::jet(double r, int order) const {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "profile radius must be finite and >= 0");
    return model_->radial_jet(r, order);
}

double RadialProfile::laplacian_power(double r, int n, int m) const {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "profile radius must be finite and >= 0");
    require(n >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
    require(m >= 0 && 2 * m <= Jet::max_order, ErrorCode::unsupported_order, "Laplacian power out of range");
    if (m == 0) return value(r);
    return model_->laplacian_power(r, n, m);
}

RadialProfile rho_profile(RhoExpression expr, TailDescriptor tail, std::string family, double parameter) {
    return RadialProfile(std::make_shared<RhoModel>(std::move(expr)), tail, std::move(family), parameter);
}

RadialProfile flat_profile(double c) {
    return rho_profile([c](const Jet& rho) { return Jet(c, rho.order()); }, {0.0, c, 1000}, "flat", c);
}

RadialProfile log_profile(double alpha) {
    require(std::isfinite(alpha), ErrorCode::domain, "alpha must be finite");
    return rho_profile([alpha](const Jet& rho) { return -0.5 * alpha * log(1.0 + rho); }, {alpha, 0.0, 2}, "alpha",
                       alpha);
}

RadialProfile family_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 2.0)) {
        std::ostringstream msg;
        msg << "alpha = " << alpha << " lies outside [0, 2)";
        fail(ErrorCode::domain, msg.str());
    }
    return log_profile(alpha);
}

RadialProfile sphere_factor() {
    return rho_profile([](const Jet& rho) { return std::log(2.0) - log(1.0 + rho); }, {2.0, std::log(2.0), 2},
                       "sphere", 2.0);
}

RadialProfile capped_log(int variant) {
    if (variant == 0)
        return rho_profile([](const Jet& rho) { return -0.5 * log(1.0 + rho); }, {1.0, 0.0, 2}, "capped_log", 0.0);
    if (variant == 1)
        return rho_profile([](const Jet& rho) { return -0.25 * log(1.0 + rho * rho); }, {1.0, 0.0, 4}, "capped_log",
                           1.0);
    fail(ErrorCode::invalid_argument, "capped_log variant must be 0 or 1");
}

RadialProfile dilate(const RadialProfile& u, double lambda) {
    require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::domain, "dilation factor must be positive");
    TailDescriptor t = u.tail();
    t.c -= t.alpha * std::log(lambda);
    return RadialProfile(std::make_shared<DilatedModel>(u.model(), lambda), t, u.family(), u.parameter());
}

}  // namespace qdeficit
