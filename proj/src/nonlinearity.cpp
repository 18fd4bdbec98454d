#include "hardylab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hardylab/error.hpp"

namespace hardylab {

namespace {
std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace

Nonlinearity::Nonlinearity(std::string name, Fn f, Fn df, bool vanishes_on_nonpositive,
                           double bound)
    : name_(std::move(name)),
      f_(std::move(f)),
      df_(std::move(df)),
      vanishes_on_nonpositive_(vanishes_on_nonpositive),
      bound_(bound) {}

Nonlinearity Nonlinearity::zero() {
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, true, 0.0};
}

Nonlinearity Nonlinearity::power(double p) {
    if (!(p >= 1.0)) throw LabError(Stage::config, "power nonlinearity needs p >= 1");
    return {"power(" + fmt(p) + ")",
            [p](double t) { return std::copysign(std::pow(std::abs(t), p), t); },
            [p](double t) { return p == 1.0 ? 1.0 : p * std::pow(std::abs(t), p - 1.0); }, false};
}

Nonlinearity Nonlinearity::exponential() {
    return {"exp", [](double t) { return std::expm1(t); }, [](double t) { return std::exp(t); },
            false};
}

Nonlinearity Nonlinearity::positive_power(double p) {
    if (!(p >= 1.0)) throw LabError(Stage::config, "positive_power nonlinearity needs p >= 1");
    return {"positive_power(" + fmt(p) + ")",
            [p](double t) { return t > 0 ? std::pow(t, p) : 0.0; },
            [p](double t) { return t > 0 ? (p == 1.0 ? 1.0 : p * std::pow(t, p - 1.0)) : 0.0; },
            true};
}

Nonlinearity Nonlinearity::linear(double c) {
    if (!(c >= 0.0)) throw LabError(Stage::config, "linear nonlinearity needs c >= 0");
    return {"linear(" + fmt(c) + ")", [c](double t) { return c * t; }, [c](double) { return c; },
            false};
}

bool Nonlinearity::monotone() const {
    if ((*this)(0.0) != 0.0) return false;
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = -400; k <= 400; ++k) {
        const double t = std::copysign(std::pow(std::abs(k) / 40.0, 2.0), k);
        const double v = (*this)(t);
        if (std::isnan(v) || v < prev) return false;
        prev = v;
    }
    return true;
}

Nonlinearity reflect(const Nonlinearity& f) {
    auto ff = f.f_;
    auto dd = f.df_;
    // f vanishes on t <= 0  <=>  f^ vanishes on t >= 0, so the flag is not inherited.
    bool vanishes = false;
    if (f.name_ == "zero") vanishes = true;
    Nonlinearity r("reflect(" + f.name_ + ")", [ff](double t) { return -ff(-t); },
                   [dd](double t) { return dd(-t); }, vanishes, f.bound_);
    r.level_ = f.level_;
    return r;
}

Nonlinearity truncate(const Nonlinearity& f, double n) {
    if (!(n > 0)) throw LabError(Stage::config, "truncation level must be positive");
    auto ff = f.f_;
    auto dd = f.df_;
    Nonlinearity r(
        "truncate(" + f.name_ + "," + fmt(n) + ")",
        [ff, n](double t) { return std::clamp(ff(t), -n, n); },
        [ff, dd, n](double t) {
            const double v = ff(t);
            return (v > -n && v < n) ? dd(t) : 0.0;
        },
        f.vanishes_on_nonpositive_, std::min(f.bound_, n));
    r.level_ = f.level_ ? std::min(*f.level_, n) : n;
    return r;
}

}  // namespace hardylab
