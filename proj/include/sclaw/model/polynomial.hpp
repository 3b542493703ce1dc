#pragma once

#include <string>
#include <vector>

namespace sclaw::model {

/// p(v) = sum_k coeffs[k] v^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  double operator()(double v) const noexcept {
    double s = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * v + *it;
    return s;
  }

  Polynomial derivative() const {
    std::vector<double> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(static_cast<double>(k) * coeffs_[k]);
    return Polynomial(std::move(d));
  }

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  std::string to_string() const {
    std::string s;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (k) s += ", ";
      s += std::to_string(coeffs_[k]);
    }
    return "[" + s + "]";
  }

 private:
  std::vector<double> coeffs_;
};

}  // namespace sclaw::model
