#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace hardylab {

/// Continuous nondecreasing f with f(0) = 0, with its derivative where it exists.
class Nonlinearity {
public:
    using Fn = std::function<double(double)>;

    Nonlinearity(std::string name, Fn f, Fn df, bool vanishes_on_nonpositive,
                 double bound = std::numeric_limits<double>::infinity());

    static Nonlinearity zero();
    /// |t|^{p-1} t, p >= 1
    static Nonlinearity power(double p);
    /// e^t - 1
    static Nonlinearity exponential();
    /// t_+^p, p >= 1
    static Nonlinearity positive_power(double p);
    /// c t, c >= 0
    static Nonlinearity linear(double c);

    double operator()(double t) const { return f_(t); }
    double derivative(double t) const { return df_(t); }
    const std::string& name() const { return name_; }
    bool vanishes_on_nonpositive() const { return vanishes_on_nonpositive_; }
    /// sup |f|, infinite for unbounded f.
    double bound() const { return bound_; }
    bool bounded() const { return bound_ < std::numeric_limits<double>::infinity(); }
    std::optional<double> truncation_level() const { return level_; }
    /// Sampled check of monotonicity and f(0) = 0 over a sign-spanning grid.
    bool monotone() const;

private:
    friend Nonlinearity truncate(const Nonlinearity& f, double n);
    friend Nonlinearity reflect(const Nonlinearity& f);

    std::string name_;
    Fn f_, df_;
    bool vanishes_on_nonpositive_ = false;
    double bound_;
    std::optional<double> level_;
};

/// f^(t) = -f(-t)
Nonlinearity reflect(const Nonlinearity& f);
/// f_n = max(-n, min(n, f))
Nonlinearity truncate(const Nonlinearity& f, double n);

}  // namespace hardylab
