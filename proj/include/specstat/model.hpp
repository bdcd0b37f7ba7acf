#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <variant>

#include "specstat/errors.hpp"

namespace specstat {

enum class Model
{
    mk,
    rb
};

inline std::string_view to_string(Model m) { return m == Model::mk ? "mk" : "rb"; }

inline Model parse_model(std::string_view s)
{
    if (s == "mk") return Model::mk;
    if (s == "rb") return Model::rb;
    throw ConfigError("unknown model '" + std::string(s) + "' (expected mk or rb)");
}

/// Modified Kepler parameters. Only beta is stored; omega = sqrt(2 beta).
class MkParams
{
  public:
    explicit MkParams(double beta) : beta_(beta)
    {
        if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("MK beta must be positive and finite");
    }

    double beta() const noexcept { return beta_; }
    double omega() const noexcept { return std::sqrt(2.0 * beta_); }

    friend bool operator==(const MkParams&, const MkParams&) = default;

  private:
    double beta_;
};

/// Unit-area rectangular billiard with aspect parameter alpha.
///
/// The side paired with the first quantum number m has length alpha^{-1/4},
/// the side paired with n has length alpha^{1/4}.
class RbParams
{
  public:
    explicit RbParams(double alpha) : alpha_(alpha)
    {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("RB alpha must be positive and finite");
    }

    double alpha() const noexcept { return alpha_; }
    double side_m() const noexcept { return std::pow(alpha_, -0.25); }
    double side_n() const noexcept { return std::pow(alpha_, 0.25); }
    double half_perimeter() const noexcept { return side_m() + side_n(); }

    friend bool operator==(const RbParams&, const RbParams&) = default;

  private:
    double alpha_;
};

using ModelParams = std::variant<MkParams, RbParams>;

inline Model model_of(const ModelParams& p)
{
    return std::holds_alternative<MkParams>(p) ? Model::mk : Model::rb;
}

/// The ensemble random variable: beta for MK, alpha for RB.
inline double parameter_value(const ModelParams& p)
{
    return std::visit(
        [](const auto& q) {
            if constexpr (std::is_same_v<std::decay_t<decltype(q)>, MkParams>)
                return q.beta();
            else
                return q.alpha();
        },
        p);
}

inline ModelParams make_params(Model m, double value)
{
    if (m == Model::mk) return MkParams(value);
    return RbParams(value);
}

}  // namespace specstat
