#ifndef ENN_FLUX_HPP_
#define ENN_FLUX_HPP_

#include <string>

namespace enn {

/// Spatial flux of u_t + f(u)_x = 0: either f(u) = alpha*u or f(u) = u^2/2.
class FluxModel {
 public:
  enum class Kind { kLinear, kBurgers };

  static FluxModel Linear(double alpha) { return FluxModel(Kind::kLinear, alpha); }
  static FluxModel Burgers() { return FluxModel(Kind::kBurgers, 0.0); }

  Kind kind() const { return kind_; }
  bool is_linear() const { return kind_ == Kind::kLinear; }
  double alpha() const { return alpha_; }

  double flux(double u) const {
    return kind_ == Kind::kLinear ? alpha_ * u : 0.5 * u * u;
  }
  /// Characteristic speed f'(u).
  double speed(double u) const {
    return kind_ == Kind::kLinear ? alpha_ : u;
  }

  std::string name() const { return is_linear() ? "linear" : "burgers"; }

 private:
  FluxModel(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_;
  double alpha_;
};

}  // namespace enn

#endif  // ENN_FLUX_HPP_
